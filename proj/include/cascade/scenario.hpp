#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/dressed.hpp"
#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/qsystem.hpp"

namespace cascade {

enum class ScenarioKind { spectrum_map, dynamics, g2, g1, spectrum, anticrossing };

std::string_view kind_name(ScenarioKind kind);

/// Scenario-file error, carrying the 1-based line number (0 for whole-file errors).
class ParseError : public InvalidInputError {
 public:
  ParseError(int line, const std::string& message)
      : InvalidInputError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A fully validated run description. Every grid is finite and strictly ascending.
struct Scenario {
  ScenarioKind kind = ScenarioKind::g2;
  SystemParams params;
  std::string output_prefix;          ///< defaults to the kind name
  double detector_sigma_ps = 140.0;

  std::vector<double> detuning_grid;     ///< ueV (anticrossing)
  std::vector<double> hbar_omega_grid;   ///< ueV (spectrum-map)
  std::vector<double> time_grid;         ///< ps (dynamics, g1, spectrum)
  std::vector<double> energy_grid;       ///< ueV relative to the laser (spectrum)
  double tau_max_ps = 15000.0;           ///< g2
  double tau_step_ps = 10.0;             ///< g2

  LineId line_a{Side::L, DressedLabel::plus};
  LineId line_b{Side::R, DressedLabel::plus};
  std::vector<LineId> lines;             ///< g1, spectrum

  PulseShape pulse;

  /// Every key as written in the file (after validation), for the manifest.
  std::map<std::string, std::string> explicit_keys;
};

/// Parses the line-oriented `key = value` format:
///
///   # comment
///   kind = g2
///   [system]
///   delta_laser_ueV = -63
///   [grid]
///   tau_max_ps = 15000
///
/// Keys may appear before any section or inside their own section. Grids are
/// written `start:step:stop` or as comma-separated ascending lists. Unknown
/// keys, malformed numbers and out-of-range values throw ParseError with the
/// offending line number.
Scenario parse_scenario(std::string_view text);

}  // namespace cascade
