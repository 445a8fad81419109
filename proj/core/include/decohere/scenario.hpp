#pragma once

// JSON scenario documents. Validation is fail-closed: unknown keys, missing
// required keys and wrongly typed values raise SchemaError before anything
// is computed.
//
// Complex numbers are written either as a plain number or as [re, im];
// matrices are arrays of rows.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decohere/dynamics.hpp"

namespace decohere {

inline constexpr std::array<std::string_view, 8> kCheckNames = {
    "covariance",   "rotating_frame",    "sandwich",
    "time_dependent_riccati", "s_diagonalization", "displaced",
    "riccati_cross", "state_sanity"};

struct RunSection {
  PropagationMode mode = PropagationMode::rotating_stepped;
  std::vector<std::string> checks;  // empty: all of kCheckNames
  std::string method = "newton";    // newton | subspace | both
  std::string branch = "lower";     // lower | upper | matched
};

struct ScenarioFile {
  Scenario scenario;
  RunSection run;
  std::optional<DephasingCoupling> dephasing;
};

/// Throws SchemaError, DimensionCapError (N > 64) or InvalidStateError.
ScenarioFile parse_scenario(std::string_view json_text);

/// As parse_scenario; unreadable files raise SchemaError.
ScenarioFile load_scenario(const std::filesystem::path& path);

/// The scenario with every default filled in, as JSON text.
std::string resolved_json(const ScenarioFile& file);

/// Sets the number at a dotted key path (e.g. "qubit.beta",
/// "bath.modes.0.g_re") and returns the edited document.
std::string with_override(std::string_view json_text, std::string_view key,
                          double value);

std::string_view to_string(PropagationMode mode);
/// Throws SchemaError for an unknown name.
PropagationMode parse_mode(std::string_view name);

}  // namespace decohere
