#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "checks.hpp"
#include "decohere/errors.hpp"
#include "decohere/riccati.hpp"
#include "decohere/scenario.hpp"

namespace decohere::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string command;
  std::string scenario;
  std::string mode;
  std::string method;
  std::string branch;
  std::string out;
  int steps = 0;
  std::string sweep;
};

struct Job {
  std::string text;   // scenario JSON after overrides
  std::string out;    // output path, possibly empty
  std::string label;  // sweep point, empty for a single run
};

struct JobResult {
  int code = kOk;
  std::string out;
  std::string err;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string complex_text(Complex c) {
  std::ostringstream os;
  os << std::setprecision(12) << c.real() << (c.imag() < 0 ? " - " : " + ")
     << std::abs(c.imag()) << "i";
  return os.str();
}

// Writes through a temporary file so a failed run never leaves partial output.
void write_atomically(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

std::string csv_body(const Trajectory& tr) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << csv_header() << '\n';
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const QubitMatrix& r = tr.reduced_states[k];
    const StateDiagnostics& d = tr.diagnostics[k];
    os << tr.times[k];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) os << ',' << r(i, j).real() << ',' << r(i, j).imag();
    os << ',' << (r * pauli::x()).trace().real() << ','
       << (r * pauli::y()).trace().real() << ','
       << (r * pauli::z()).trace().real() << ',' << d.purity << ','
       << d.trace_dev << ',' << d.positivity_floor << '\n';
  }
  return os.str();
}

json scenario_echo(const ScenarioFile& f) { return json::parse(resolved_json(f)); }

JobResult simulate(const Options& opt, const Job& job) {
  JobResult res;
  std::ostringstream out;
  const auto start = Clock::now();
  const ScenarioFile f = parse_scenario(job.text);
  const PropagationMode mode = opt.mode.empty() ? f.run.mode : parse_mode(opt.mode);
  const Trajectory tr = reduced_dynamics(f.scenario, mode);
  write_atomically(job.out, csv_body(tr));
  out << job.label << "simulate: wrote " << tr.times.size() << " rows to "
      << job.out << " (" << to_string(mode) << ", " << std::fixed
      << std::setprecision(3) << seconds_since(start) << " s)\n";
  res.out = out.str();
  return res;
}

SpectralSelector selector_for(const std::string& branch,
                              const RiccatiProblem& p,
                              const std::optional<RiccatiSolution>& newton) {
  if (branch == "lower") return SpectralSelector::lower();
  if (branch == "upper") return SpectralSelector::upper();
  const ComplexMatrix x = newton ? newton->x() : solve_newton(p).x();
  const RealVector lam = branch_eigenvalues(p, x);
  return SpectralSelector::matching({lam.data(), lam.data() + lam.size()});
}

json solution_json(const RiccatiSolution& s, const Diagonalization& d) {
  return {{"method", std::string(to_string(s.method()))},
          {"iterations", s.iterations()},
          {"residual", s.residual()},
          {"x_norm", s.x().norm()},
          {"offdiag_residual", d.offdiag_residual},
          {"cond_ux", d.cond_ux},
          {"residual_trace", s.residual_trace()}};
}

std::string solution_line(const RiccatiSolution& s, const Diagonalization& d) {
  std::ostringstream os;
  os << to_string(s.method()) << ": residual " << sci(s.residual())
     << ", iterations " << s.iterations() << ", ||X||_F " << sci(s.x().norm())
     << ", off-diagonal " << sci(d.offdiag_residual) << ", cond(U_X) "
     << sci(d.cond_ux) << '\n';
  return os.str();
}

JobResult riccati(const Options& opt, const Job& job) {
  JobResult res;
  std::ostringstream out;
  const auto start = Clock::now();
  const ScenarioFile f = parse_scenario(job.text);
  const std::string method = opt.method.empty() ? f.run.method : opt.method;
  const std::string branch = opt.branch.empty() ? f.run.branch : opt.branch;

  const BlockOp h = hamiltonian_static(f.scenario.qubit, f.scenario.bath);
  const RiccatiProblem p = RiccatiProblem::from_block(h);
  json report = {{"command", "riccati"},
                 {"scenario", scenario_echo(f)},
                 {"method", method},
                 {"branch", branch}};

  std::optional<RiccatiSolution> newton;
  std::optional<RiccatiSolution> subspace;
  if (method == "newton" || method == "both") {
    const auto t0 = Clock::now();
    newton = solve_newton(p);
    report["timings"]["newton_s"] = seconds_since(t0);
    const Diagonalization d = diagonalize(h, *newton);
    report["newton"] = solution_json(*newton, d);
    if (newton->iterations() == 0 && newton->x().norm() == 0.0 &&
        newton->residual() == 0.0)
      out << job.label << "newton: X = 0 is exact, residual 0\n";
    else
      out << job.label << solution_line(*newton, d);
  }
  if (method == "subspace" || method == "both") {
    const auto t0 = Clock::now();
    subspace = solve_invariant_subspace(p, selector_for(branch, p, newton));
    report["timings"]["subspace_s"] = seconds_since(t0);
    const Diagonalization d = diagonalize(h, *subspace);
    report["subspace"] = solution_json(*subspace, d);
    out << job.label << solution_line(*subspace, d);
  }
  if (newton && subspace) {
    const double gap = (newton->x() - subspace->x()).norm();
    report["agreement"] = gap;
    out << job.label << "agreement: ||X_newton - X_subspace||_F = " << sci(gap)
        << " (" << branch << " branch)\n";
  }
  if (f.dephasing) {
    const DephasingRoots roots = solve_dephasing_quadratic(*f.dephasing);
    const RiccatiProblem dp = dephasing_problem(f.scenario.bath, *f.dephasing);
    const Eigen::Index n = f.scenario.bath.dimension();
    const double r1 =
        residual(dp, roots.principal * ComplexMatrix::Identity(n, n));
    const double r2 = residual(dp, roots.other * ComplexMatrix::Identity(n, n));
    report["dephasing"] = {
        {"principal", {roots.principal.real(), roots.principal.imag()}},
        {"other", {roots.other.real(), roots.other.imag()}},
        {"operator_residual_principal", r1},
        {"operator_residual_other", r2}};
    out << job.label << "dephasing: x = " << complex_text(roots.principal)
        << ", other root " << complex_text(roots.other)
        << ", operator residuals " << sci(r1) << ", " << sci(r2) << '\n';
  }
  report["timings"]["total_s"] = seconds_since(start);
  report["exit_code"] = int(kOk);
  if (!job.out.empty()) write_atomically(job.out, report.dump(2) + "\n");
  res.out = out.str();
  return res;
}

JobResult verify(const Options& opt, const Job& job) {
  JobResult res;
  std::ostringstream out;
  const auto start = Clock::now();
  ScenarioFile f = parse_scenario(job.text);
  if (!opt.mode.empty()) f.run.mode = parse_mode(opt.mode);
  const std::vector<CheckResult> checks = run_checks(f);

  json list = json::array();
  int passed = 0;
  for (const CheckResult& c : checks) {
    passed += c.passed ? 1 : 0;
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"measured", c.measured},
                    {"tolerance", c.tolerance},
                    {"note", c.note},
                    {"seconds", c.seconds}});
    out << job.label << (c.passed ? "PASS " : "FAIL ") << std::left
        << std::setw(24) << c.name << " measured " << sci(c.measured)
        << "  tolerance " << sci(c.tolerance) << "  " << c.note << '\n';
  }
  const bool ok = passed == int(checks.size());
  out << job.label << "verify: " << passed << "/" << checks.size()
      << " checks passed\n";
  res.code = ok ? kOk : kCheckFailed;
  const json report = {{"command", "verify"},
                       {"scenario", scenario_echo(f)},
                       {"checks", list},
                       {"passed", ok},
                       {"timings", {{"total_s", seconds_since(start)}}},
                       {"exit_code", res.code}};
  if (!job.out.empty()) write_atomically(job.out, report.dump(2) + "\n");
  res.out = out.str();
  return res;
}

JobResult run_job(const Options& opt, const Job& job) {
  const auto fail = [&](int code, const std::string& kind, const std::string& what) {
    JobResult r;
    r.code = code;
    r.err = job.label + "error (" + kind + "): " + what + "\n";
    return r;
  };
  try {
    if (opt.command == "simulate") return simulate(opt, job);
    if (opt.command == "riccati") return riccati(opt, job);
    return verify(opt, job);
  } catch (const SchemaError& e) {
    return fail(kSchema, "schema", e.what());
  } catch (const DimensionCapError& e) {
    return fail(kDimensionCap, "dimension cap", e.what());
  } catch (const InvalidStateError& e) {
    return fail(kInvalidState, "invalid state", e.what());
  } catch (const NonConvergenceError& e) {
    return fail(kNonConvergence, "non-convergence",
                std::string(e.what()) + " (best residual " +
                    sci(e.best_residual()) + ")");
  } catch (const SingularError& e) {
    return fail(kNonConvergence, "non-convergence", e.what());
  } catch (const NoGraphRepresentationError& e) {
    return fail(kNonConvergence, "non-convergence", e.what());
  } catch (const AmbiguousSubspaceError& e) {
    return fail(kNonConvergence, "non-convergence", e.what());
  } catch (const Error& e) {
    return fail(kSchema, "invalid scenario", e.what());
  } catch (const std::exception& e) {
    return fail(kUsage, "io", e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string suffixed(const std::string& path, const std::string& tag) {
  if (path.empty()) return path;
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + tag + p.extension().string()))
      .string();
}

std::vector<Job> expand(const Options& opt, const std::string& base) {
  std::string text = base;
  if (opt.steps > 0) text = with_override(text, "time.steps", opt.steps);
  if (opt.sweep.empty()) return {{text, opt.out, ""}};

  const auto eq = opt.sweep.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == opt.sweep.size())
    throw CLI::ValidationError("--sweep", "expected key=v1,v2,...");
  const std::string key = opt.sweep.substr(0, eq);
  std::string tag_key = key;
  std::replace(tag_key.begin(), tag_key.end(), '.', '-');
  std::vector<Job> jobs;
  std::stringstream values(opt.sweep.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) {
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw CLI::ValidationError("--sweep", "'" + item + "' is not a number");
    const std::string tag = tag_key + "_" + item;
    jobs.push_back({with_override(text, key, v), suffixed(opt.out, tag),
                    "[" + key + "=" + item + "] "});
  }
  return jobs;
}

std::vector<JobResult> run_pool(const Options& opt, const std::vector<Job>& jobs) {
  std::vector<JobResult> results(jobs.size());
  const std::size_t workers = std::min<std::size_t>(
      jobs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++)
        results[i] = run_job(opt, jobs[i]);
    }));
  for (auto& f : pool) f.get();
  return results;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("scenario", opt.scenario, "Scenario JSON file")->required();
  sub->add_option("--out", opt.out, "Output path");
  sub->add_option("--steps", opt.steps, "Override time.steps")
      ->check(CLI::PositiveNumber);
  sub->add_option("--sweep", opt.sweep,
                  "Run once per value: key=v1,v2,... (e.g. qubit.beta=0.1,0.2)");
}

}  // namespace

const std::string& csv_header() {
  static const std::string header =
      "t,rho00_re,rho00_im,rho01_re,rho01_im,rho10_re,rho10_im,rho11_re,"
      "rho11_im,bloch_x,bloch_y,bloch_z,purity,trace_dev,pos_floor";
  return header;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options opt;
  CLI::App app{"Reduced qubit dynamics, Riccati block diagonalization and "
               "identity checks for a qubit coupled to a bosonic bath"};
  app.name("decohere");
  app.require_subcommand(1);
  const std::vector<std::string> modes = {"rotating_stepped", "static_exact",
                                          "factored"};

  CLI::App* sim = app.add_subcommand("simulate", "Write the reduced trajectory as CSV");
  add_common(sim, opt);
  sim->get_option("--out")->required();
  sim->add_option("--mode", opt.mode, "Propagation mode")->check(CLI::IsMember(modes));

  CLI::App* ric = app.add_subcommand("riccati", "Solve the operator Riccati equation");
  add_common(ric, opt);
  ric->add_option("--method", opt.method, "newton, subspace or both")
      ->check(CLI::IsMember({"newton", "subspace", "both"}));
  ric->add_option("--branch", opt.branch, "Spectral branch for the subspace solver")
      ->check(CLI::IsMember({"lower", "upper", "matched"}));

  CLI::App* ver = app.add_subcommand("verify", "Run the identity checks");
  add_common(ver, opt);
  ver->add_option("--mode", opt.mode, "Mode used by the state_sanity check")
      ->check(CLI::IsMember(modes));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  opt.command = app.get_subcommands().front()->get_name();

  std::vector<Job> jobs;
  try {
    jobs = expand(opt, read_file(opt.scenario));
  } catch (const CLI::ValidationError& e) {
    err << "error (usage): " << e.what() << '\n';
    return kUsage;
  } catch (const SchemaError& e) {
    err << "error (schema): " << e.what() << '\n';
    return kSchema;
  }

  int code = kOk;
  for (const JobResult& r : run_pool(opt, jobs)) {
    out << r.out;
    err << r.err;
    if (code == kOk) code = r.code;
  }
  return code;
}

}  // namespace decohere::cli
