#include "decohere/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "decohere/errors.hpp"

namespace decohere {
namespace {

std::string shape_str(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

double one_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Padé coefficients b_0..b_m for the diagonal approximants of exp.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0,
                                          420.0,   30.0,    1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0,
                                          277200.0,   25200.0,   1512.0,
                                          56.0,       1.0};
constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Largest 1-norm for which the degree-m approximant meets unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
ComplexMatrix pade_low(const ComplexMatrix& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = a * a;
  ComplexMatrix power = id;
  ComplexMatrix odd = ComplexMatrix::Zero(n, n);
  ComplexMatrix even = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    even += b[k] * power;
    odd += b[k + 1] * power;
    power = power * a2;
  }
  const ComplexMatrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

ComplexMatrix pade13(const ComplexMatrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const ComplexMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * id);
  const ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                          b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

// Applies the unitary 2x2 rotation g acting on indices (p, q):
// a <- g^H a g, v <- v g.
struct Rotation {
  Complex pp, pq, qp, qq;
};

void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p,
            Eigen::Index q, const Rotation& g) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * g.pp + akq * g.qp;
    a(k, q) = akp * g.pq + akq * g.qq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(g.pp) * apk + std::conj(g.qp) * aqk;
    a(q, k) = std::conj(g.pq) * apk + std::conj(g.qq) * aqk;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * g.pp + vkq * g.qp;
    v(k, q) = vkp * g.pq + vkq * g.qq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: cannot multiply " + shape_str(a) + " by " +
                     shape_str(b));
  return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix expm(const ComplexMatrix& a, Complex scale) {
  if (a.rows() != a.cols())
    throw ShapeError("expm: matrix must be square, got " + shape_str(a));
  const ComplexMatrix x = scale * a;
  const double norm = one_norm(x);
  if (norm <= kTheta3) return pade_low(x, kPade3);
  if (norm <= kTheta5) return pade_low(x, kPade5);
  if (norm <= kTheta7) return pade_low(x, kPade7);
  if (norm <= kTheta9) return pade_low(x, kPade9);

  const int squarings =
      std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  ComplexMatrix result = pade13(x / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

HermitianEig hermitian_eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw ShapeError("hermitian_eig: matrix must be square, got " +
                     shape_str(a));
  const double norm = a.norm();
  if (hermiticity_defect(a) > tol::kHermitian * norm)
    throw NotHermitianError("hermitian_eig: input is not Hermitian");

  const Eigen::Index n = a.rows();
  ComplexMatrix work = 0.5 * (a + a.adjoint());
  ComplexMatrix vecs = ComplexMatrix::Identity(n, n);

  const double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(work) <= eps * norm) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(work(p, q));
        if (mag <= std::numeric_limits<double>::min()) continue;
        const double app = work(p, p).real();
        const double aqq = work(q, q).real();
        // Skip entries already negligible against both diagonal entries.
        if (mag < 1e-3 * eps * std::abs(app) &&
            mag < 1e-3 * eps * std::abs(aqq)) {
          work(p, q) = work(q, p) = 0.0;
          continue;
        }
        const Complex phase = std::conj(work(p, q)) / mag;  // e^{-i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        rotate(work, vecs, p, q, {c, s, -s * phase, c * phase});
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) {
                     return work(i, i).real() < work(j, j).real();
                   });

  HermitianEig out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = work(order[k], order[k]).real();
    out.eigenvectors.col(k) = vecs.col(order[k]);
  }
  return out;
}

ComplexMatrix solve_sylvester(const ComplexMatrix& p, const ComplexMatrix& q,
                              const ComplexMatrix& r) {
  if (p.rows() != p.cols() || q.rows() != q.cols())
    throw ShapeError("solve_sylvester: p and q must be square");
  const Eigen::Index n = p.rows();
  const Eigen::Index m = q.rows();
  if (r.rows() != m || r.cols() != n)
    throw ShapeError("solve_sylvester: r is " + shape_str(r) + ", expected " +
                     std::to_string(m) + "x" + std::to_string(n));

  // Unknown delta(i, l) sits at column-major index i + l*m.
  const Eigen::Index dim = m * n;
  ComplexMatrix kron = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index row = i + j * m;
      for (Eigen::Index l = 0; l < n; ++l) kron(row, i + l * m) += p(l, j);
      for (Eigen::Index k = 0; k < m; ++k) kron(row, k + j * m) += q(i, k);
    }
  }

  Eigen::PartialPivLU<ComplexMatrix> lu(kron);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13))
    throw SingularError(
        "solve_sylvester: linearized system is singular (spectra of p and -q "
        "overlap), rcond = " +
        std::to_string(rcond));

  const Eigen::Map<const Eigen::VectorXcd> rhs(r.data(), dim);
  Eigen::VectorXcd sol = lu.solve(rhs);
  ComplexMatrix delta = Eigen::Map<ComplexMatrix>(sol.data(), m, n);
  if (!all_finite(delta))
    throw SingularError("solve_sylvester: non-finite solution");
  return delta;
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

double operator_norm_estimate(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  const ComplexMatrix gram = a.adjoint() * a;
  const HermitianEig eig = hermitian_eig(0.5 * (gram + gram.adjoint()));
  return std::sqrt(std::max(0.0, eig.eigenvalues(eig.eigenvalues.size() - 1)));
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw ShapeError("hermiticity_defect: matrix must be square");
  return (a - a.adjoint()).norm();
}

bool is_hermitian(const ComplexMatrix& a) {
  return a.rows() == a.cols() &&
         hermiticity_defect(a) <= tol::kHermitian * a.norm();
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

ComplexMatrix identity(Eigen::Index n) {
  return ComplexMatrix::Identity(n, n);
}

}  // namespace decohere
