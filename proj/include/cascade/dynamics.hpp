#pragma once

#include <span>
#include <vector>

#include "cascade/numerics.hpp"
#include "cascade/qsystem.hpp"

namespace cascade {

/// Deviations of a matrix from the density-matrix invariants.
struct DensityCheck {
  double trace_error = 0.0;       ///< |tr(rho) - 1|
  double hermiticity_error = 0.0; ///< ||rho - rho^dag||_max
  double min_eigenvalue = 0.0;    ///< of the Hermitian part
};

DensityCheck inspect_density_matrix(const ComplexMatrix& rho);

/// Worst-case invariant violations observed along one or more trajectories.
/// Trace drift is measured against the trace of each trajectory's initial state,
/// eigenvalues relative to the current trace (propagated operators such as
/// A rho A^dag are not unit trace).
struct TrajectoryMonitor {
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  long samples = 0;

  void observe(const ComplexMatrix& rho, double reference_trace);
  void merge(const TrajectoryMonitor& other);
};

/// Unique stationary state of L, normalized to unit trace. The null space is
/// checked first: more than one singular value below 1e-9 of the largest
/// throws NonUniqueSteadyStateError.
ComplexMatrix steady_state(const Superoperator& l);

/// rho(t) for every grid time, starting from rho0 at t_grid[0].
std::vector<ComplexMatrix> evolve(const Superoperator& l, const ComplexMatrix& rho0,
                                  std::span<const double> t_grid,
                                  TrajectoryMonitor* monitor = nullptr);

/// Rectangular excitation pulse. The drive is on for start < t <= start + duration.
struct PulseShape {
  double duration = 20000.0;       ///< ps
  double start = 0.0;              ///< ps
  double period = 1.0e6 / 17.0;    ///< repetition period, ps (17 MHz)

  /// Throws InvalidInputError unless 0 < duration < period.
  void validate() const;
  bool drive_on(double t) const { return t > start && t <= start + duration; }
};

struct PulseResponse {
  std::vector<double> t;    ///< ps
  std::vector<double> i_l;  ///< 1/ps, detected on L_plus and L_zero together
  std::vector<double> i_r;  ///< 1/ps, detected on R_plus and R_zero together
};

/// Starts in the undriven steady state and evolves piecewise with the drive
/// switched on inside the pulse. The detector on each side sees the plus and
/// zero lines through one filter, so the intensity is tr(J^dag J rho) with
/// J = J_plus + J_zero of the dressed basis belonging to the instantaneous drive.
PulseResponse pulse_response(const SystemParams& p, const PulseShape& pulse,
                             std::span<const double> t_grid, TrajectoryMonitor* monitor = nullptr);

/// The detector operators used by pulse_response while the drive is on.
ComplexMatrix detector_operator_l(const SystemParams& p);
ComplexMatrix detector_operator_r(const SystemParams& p);

}  // namespace cascade
