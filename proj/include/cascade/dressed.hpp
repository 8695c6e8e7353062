#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/numerics.hpp"
#include "cascade/qsystem.hpp"

namespace cascade {

enum class DressedLabel { plus = 0, zero = 1, minus = 2 };

/// L lines: XX -> H decay out of a dressed state. R lines: H -> G decay into one.
enum class Side { L = 0, R = 1 };

struct LineId {
  Side side = Side::L;
  DressedLabel label = DressedLabel::plus;

  /// "L_plus", "R_zero", ...
  std::string name() const;
  /// Accepts the names produced by name(); throws InvalidInputError otherwise.
  static LineId parse(std::string_view text);

  auto operator<=>(const LineId&) const = default;
};

std::string_view label_name(DressedLabel label);

/// One eigenstate of the driven {G, V, XX} block.
struct DressedState {
  DressedLabel label = DressedLabel::plus;
  double energy = 0.0;        ///< rotating frame, ueV
  Eigen::Vector3cd components; ///< amplitudes on (G, V, XX)

  /// The state in the full 4-dimensional basis (zero H amplitude).
  ComplexVector embedded() const;
};

struct DressedSet {
  std::array<DressedState, 3> states;  ///< indexed by DressedLabel

  const DressedState& operator[](DressedLabel label) const {
    return states[static_cast<std::size_t>(label)];
  }
};

/// Diagonalizes the driven block and labels the states by adiabatic continuation
/// from the two-photon resonance at the same drive: there, plus is the
/// antisymmetric G/XX combination (eigenvalue 0), zero the lower and minus the
/// upper symmetric state. For hbar_omega > 0 the block has a simple spectrum along
/// any detuning path, so the continuation preserves energy order:
/// zero < plus < minus. hbar_omega = 0 uses the weak-drive limit.
DressedSet dressed_states(const SystemParams& p);

/// Continues labels from `previous` (computed at `previous_params`) to `target` by
/// maximal eigenvector overlap, subdividing the parameter path until every step
/// is unambiguous.
DressedSet continue_dressed_states(const SystemParams& previous_params, const DressedSet& previous,
                                   const SystemParams& target);

/// Spectrally filtered jump operator for one line. `op` carries the rate prefactor (1/sqrt(ps)).
struct FilteredJump {
  LineId line;
  ComplexMatrix op;
  double lab_energy = 0.0;    ///< photon energy, ueV
  double frame_energy = 0.0;  ///< photon energy relative to the laser, ueV
};

/// Six filtered lines, ordered L_plus, L_zero, L_minus, R_plus, R_zero, R_minus.
std::vector<FilteredJump> line_catalog(const SystemParams& p, const DressedSet& d);

const FilteredJump& find_line(std::span<const FilteredJump> catalog, LineId id);

/// Emission rate trace(J^dag J rho) for every line.
std::map<LineId, double> line_intensities(std::span<const FilteredJump> catalog,
                                          const ComplexMatrix& rho);

/// Steady-state emission rate of a (possibly summed) line operator. Without
/// drive the steady state is |G><G| and nothing is emitted; the projection of
/// |G><G| onto the degenerate undriven G/XX pair would otherwise leave a
/// spurious L-line rate at the two-photon resonance.
double steady_line_intensity(const SystemParams& p, const ComplexMatrix& j, const ComplexMatrix& rho_ss);

std::map<LineId, double> line_intensities(const SystemParams& p, const ComplexMatrix& rho_ss);

struct AnticrossingRow {
  double detuning = 0.0;  ///< ueV
  LineId line;
  double energy = 0.0;     ///< lab energy, ueV
  double intensity = 0.0;  ///< 1/ps
};

/// For every detuning: dressed states (labels continued along the grid), line
/// catalog, steady state and intensities. Steady states of different points run on
/// up to `jobs` threads; rows come back in grid order, six per point.
std::vector<AnticrossingRow> anticrossing_map(const SystemParams& p,
                                              std::span<const double> detuning_grid,
                                              unsigned jobs = 1);

/// Same as anticrossing_map but sweeping hbar_omega at fixed detuning (line
/// positions versus drive strength).
struct PowerMapRow {
  double hbar_omega = 0.0;
  LineId line;
  double energy = 0.0;
  double intensity = 0.0;
};
std::vector<PowerMapRow> power_map(const SystemParams& p, std::span<const double> hbar_omega_grid,
                                   unsigned jobs = 1);

}  // namespace cascade
