#include "decohere/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "decohere/errors.hpp"

namespace decohere {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError(where + ": unknown key '" + key + "'");
  }
}

const json& required(const json& j, const std::string& where,
                     const std::string& key) {
  if (!j.contains(key))
    throw SchemaError(where + ": missing required key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(where + ": value is not finite");
  return v;
}

double number_or(const json& j, const std::string& where,
                 const std::string& key, double fallback) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

Complex complex_value(const json& j, const std::string& where) {
  if (j.is_number()) return {number(j, where), 0.0};
  if (j.is_array() && j.size() == 2)
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
  throw SchemaError(where + ": expected a number or [re, im]");
}

ComplexMatrix complex_matrix(const json& j, const std::string& where,
                             Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw SchemaError(where + ": expected " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[std::size_t(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SchemaError(where + "[" + std::to_string(i) + "]: expected " +
                        std::to_string(cols) + " columns");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = complex_value(row[std::size_t(k)], where + "[" +
                                                       std::to_string(i) + "][" +
                                                       std::to_string(k) + "]");
  }
  return m;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

QubitParams parse_qubit(const json& j) {
  const std::string where = "qubit";
  require_object(j, where);
  reject_unknown(j, where, {"alpha", "beta", "omega", "coupling"});
  QubitParams q;
  q.alpha = number(required(j, where, "alpha"), "qubit.alpha");
  q.beta = number(required(j, where, "beta"), "qubit.beta");
  q.omega = number(required(j, where, "omega"), "qubit.omega");
  if (j.contains("coupling")) {
    const json& c = j.at("coupling");
    require_object(c, "qubit.coupling");
    reject_unknown(c, "qubit.coupling", {"f_plus", "f_minus"});
    q.coupling.at_plus = number_or(c, "qubit.coupling", "f_plus", 1.0);
    q.coupling.at_minus = number_or(c, "qubit.coupling", "f_minus", -1.0);
  }
  return q;
}

BathSpec parse_bath(const json& j) {
  const std::string where = "bath";
  require_object(j, where);
  reject_unknown(j, where, {"modes", "fock_cutoff"});
  const json& modes = required(j, where, "modes");
  if (!modes.is_array() || modes.empty())
    throw SchemaError("bath.modes: expected a non-empty array");
  std::vector<BathMode> out;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const std::string w = "bath.modes[" + std::to_string(k) + "]";
    const json& m = modes[k];
    require_object(m, w);
    reject_unknown(m, w, {"omega", "g_re", "g_im"});
    const double omega = number(required(m, w, "omega"), w + ".omega");
    if (!(omega > 0.0)) throw SchemaError(w + ".omega: must be > 0");
    out.push_back({omega, Complex(number(required(m, w, "g_re"), w + ".g_re"),
                                  number_or(m, w, "g_im", 0.0))});
  }
  const int cutoff = integer(required(j, where, "fock_cutoff"), "bath.fock_cutoff");
  if (cutoff < 1) throw SchemaError("bath.fock_cutoff: must be >= 1");
  try {
    return BathSpec(std::move(out), cutoff);
  } catch (const DomainError& e) {
    throw SchemaError(std::string("bath: ") + e.what());
  }
}

QubitMatrix parse_qubit_state(const json& j) {
  const std::string where = "initial.qubit_state";
  require_object(j, where);
  reject_unknown(j, where, {"bloch", "ket", "matrix"});
  if (j.size() != 1)
    throw SchemaError(where + ": give exactly one of bloch, ket, matrix");
  if (j.contains("bloch")) {
    const json& b = j.at("bloch");
    if (!b.is_array() || b.size() != 3)
      throw SchemaError(where + ".bloch: expected [x, y, z]");
    const double x = number(b[0], where + ".bloch[0]");
    const double y = number(b[1], where + ".bloch[1]");
    const double z = number(b[2], where + ".bloch[2]");
    return 0.5 * (pauli::identity() + x * pauli::x() + y * pauli::y() +
                  z * pauli::z());
  }
  if (j.contains("ket")) {
    const json& k = j.at("ket");
    if (!k.is_array() || k.size() != 2)
      throw SchemaError(where + ".ket: expected two amplitudes");
    Eigen::Vector2cd psi(complex_value(k[0], where + ".ket[0]"),
                         complex_value(k[1], where + ".ket[1]"));
    if (psi.norm() == 0.0) throw SchemaError(where + ".ket: zero vector");
    psi.normalize();
    return psi * psi.adjoint();
  }
  return complex_matrix(j.at("matrix"), where + ".matrix", 2, 2);
}

BlockOp parse_initial(const json& j, const BathSpec& bath) {
  const std::string where = "initial";
  require_object(j, where);
  const std::string kind = text(required(j, where, "kind"), "initial.kind");
  const Eigen::Index n = bath.dimension();
  if (kind == "product") {
    reject_unknown(j, where, {"kind", "qubit_state", "env_state"});
    const QubitMatrix rho_q =
        parse_qubit_state(required(j, where, "qubit_state"));
    ComplexMatrix rho_e = vacuum_state(bath);
    if (j.contains("env_state")) {
      const json& e = j.at("env_state");
      if (e.is_string()) {
        if (e.get<std::string>() != "vacuum")
          throw SchemaError("initial.env_state: unknown state '" +
                            e.get<std::string>() + "'");
      } else {
        require_object(e, "initial.env_state");
        reject_unknown(e, "initial.env_state", {"matrix"});
        rho_e = complex_matrix(required(e, "initial.env_state", "matrix"),
                               "initial.env_state.matrix", n, n);
      }
    }
    return product_state(rho_q, rho_e);
  }
  if (kind == "explicit") {
    reject_unknown(j, where, {"kind", "matrix"});
    return unflatten(complex_matrix(required(j, where, "matrix"),
                                    "initial.matrix", 2 * n, 2 * n));
  }
  throw SchemaError("initial.kind: expected 'product' or 'explicit'");
}

RunSection parse_run(const json& j) {
  const std::string where = "run";
  require_object(j, where);
  reject_unknown(j, where, {"mode", "checks", "method", "branch"});
  RunSection run;
  if (j.contains("mode")) run.mode = parse_mode(text(j.at("mode"), "run.mode"));
  if (j.contains("checks")) {
    const json& c = j.at("checks");
    if (!c.is_array()) throw SchemaError("run.checks: expected an array");
    for (const auto& name : c) {
      const std::string s = text(name, "run.checks[]");
      if (std::find(kCheckNames.begin(), kCheckNames.end(), s) ==
          kCheckNames.end())
        throw SchemaError("run.checks: unknown check '" + s + "'");
      run.checks.push_back(s);
    }
  }
  if (j.contains("method")) {
    run.method = text(j.at("method"), "run.method");
    if (run.method != "newton" && run.method != "subspace" &&
        run.method != "both")
      throw SchemaError("run.method: expected newton, subspace or both");
  }
  if (j.contains("branch")) {
    run.branch = text(j.at("branch"), "run.branch");
    if (run.branch != "lower" && run.branch != "upper" &&
        run.branch != "matched")
      throw SchemaError("run.branch: expected lower, upper or matched");
  }
  return run;
}

}  // namespace

std::string_view to_string(PropagationMode mode) {
  switch (mode) {
    case PropagationMode::rotating_stepped:
      return "rotating_stepped";
    case PropagationMode::static_exact:
      return "static_exact";
    case PropagationMode::factored:
      return "factored";
  }
  return "unknown";
}

PropagationMode parse_mode(std::string_view name) {
  if (name == "rotating_stepped") return PropagationMode::rotating_stepped;
  if (name == "static_exact") return PropagationMode::static_exact;
  if (name == "factored") return PropagationMode::factored;
  throw SchemaError("unknown propagation mode '" + std::string(name) + "'");
}

ScenarioFile parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  require_object(doc, "scenario");
  reject_unknown(doc, "scenario",
                 {"qubit", "bath", "initial", "time", "run", "dephasing"});

  const QubitParams qubit = parse_qubit(required(doc, "scenario", "qubit"));
  const BathSpec bath = parse_bath(required(doc, "scenario", "bath"));

  const json& time = required(doc, "scenario", "time");
  require_object(time, "time");
  reject_unknown(time, "time", {"t_max", "steps", "substeps"});
  TimeGrid grid{number(required(time, "time", "t_max"), "time.t_max"),
                integer(required(time, "time", "steps"), "time.steps")};
  if (grid.t_max < 0.0) throw SchemaError("time.t_max: must be >= 0");
  if (grid.steps < 1) throw SchemaError("time.steps: must be >= 1");
  IntegratorSettings integ;
  if (time.contains("substeps"))
    integ.substeps_per_step = integer(time.at("substeps"), "time.substeps");
  if (integ.substeps_per_step < 1)
    throw SchemaError("time.substeps: must be >= 1");

  const RunSection run =
      doc.contains("run") ? parse_run(doc.at("run")) : RunSection{};

  std::optional<DephasingCoupling> dephasing;
  if (doc.contains("dephasing")) {
    const json& d = doc.at("dephasing");
    require_object(d, "dephasing");
    reject_unknown(d, "dephasing", {"m"});
    const ComplexMatrix m =
        complex_matrix(required(d, "dephasing", "m"), "dephasing.m", 2, 2);
    try {
      dephasing.emplace(QubitMatrix(m));
    } catch (const NotHermitianError& e) {
      throw SchemaError(std::string("dephasing.m: ") + e.what());
    }
  }

  // Schema first, then physics: the state check runs last.
  BlockOp initial =
      parse_initial(required(doc, "scenario", "initial"), bath);
  ScenarioFile out{Scenario{qubit, bath, std::move(initial), grid, integ}, run,
                   dephasing};
  validate_density(out.scenario.initial_state);
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string resolved_json(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  json modes = json::array();
  for (const auto& m : s.bath.modes())
    modes.push_back({{"omega", m.omega}, {"g_re", m.g.real()}, {"g_im", m.g.imag()}});
  json checks = json::array();
  if (file.run.checks.empty()) {
    for (auto name : kCheckNames) checks.push_back(std::string(name));
  } else {
    for (const auto& name : file.run.checks) checks.push_back(name);
  }
  json doc = {
      {"qubit",
       {{"alpha", s.qubit.alpha},
        {"beta", s.qubit.beta},
        {"omega", s.qubit.omega},
        {"coupling",
         {{"f_plus", s.qubit.coupling.at_plus},
          {"f_minus", s.qubit.coupling.at_minus}}}}},
      {"bath",
       {{"modes", modes},
        {"fock_cutoff", s.bath.fock_cutoff()},
        {"dimension", s.bath.dimension()}}},
      {"initial",
       {{"kind", "explicit"},
        {"qubit_marginal", matrix_json(partial_trace_env(s.initial_state))}}},
      {"time",
       {{"t_max", s.time_grid.t_max},
        {"steps", s.time_grid.steps},
        {"substeps", s.integrator.substeps_per_step}}},
      {"run",
       {{"mode", std::string(to_string(file.run.mode))},
        {"checks", checks},
        {"method", file.run.method},
        {"branch", file.run.branch}}},
  };
  if (file.dephasing) doc["dephasing"] = {{"m", matrix_json(file.dephasing->m())}};
  return doc.dump(2);
}

std::string with_override(std::string_view json_text, std::string_view key,
                          double value) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  json* node = &doc;
  std::string path(key);
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) throw SchemaError("override: malformed key '" + path + "'");
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw SchemaError("override: '" + part + "' is not an array index");
      }
      if (idx >= node->size())
        throw SchemaError("override: index " + part + " out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(part))
        throw SchemaError("override: unknown key '" + path + "'");
      node = &(*node)[part];
    } else {
      throw SchemaError("override: cannot descend into '" + part + "'");
    }
    if (last) break;
    start = dot + 1;
  }
  if (!node->is_number())
    throw SchemaError("override: '" + path + "' is not numeric");
  if (node->is_number_integer()) {
    if (value != std::floor(value))
      throw SchemaError("override: '" + path + "' must be an integer");
    *node = static_cast<long long>(value);
  } else {
    *node = value;
  }
  return doc.dump(2);
}

}  // namespace decohere
