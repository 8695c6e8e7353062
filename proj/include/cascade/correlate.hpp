#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/dressed.hpp"
#include "cascade/dynamics.hpp"

namespace cascade {

enum class Normalization { raw, normalized };

/// Sampled g2(tau) or g1(t). g2 traces live on a symmetric delay grid, g1
/// traces on a one-sided grid starting at 0.
///
/// Delay sign for g2_ab: tau > 0 means the photon on line `a` was detected
/// first. With a on an L line and b on an R line, positive delays are
/// "biexcitonic photon, then excitonic photon".
struct CorrelationTrace {
  std::vector<double> delay_ps;
  std::vector<Complex> values;
  Normalization normalization = Normalization::normalized;
  std::optional<double> convolved_sigma;  ///< ps; empty if not convolved

  std::vector<double> real_values() const;
  /// Linear interpolation of the real part; throws outside the grid.
  double real_at(double delay) const;
};

/// G(tau) = tr(B^dag B e^{L tau}[A rho A^dag]) for tau >= 0 (grid ascending).
/// Throws NumericalError if a value has a non-negligible imaginary part.
std::vector<double> qrt_two_time(const Superoperator& l, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const ComplexMatrix& rho_ss,
                                 std::span<const double> tau_grid,
                                 TrajectoryMonitor* monitor = nullptr);

/// Normalized filtered cross-correlation on the grid -tau_max..tau_max (step
/// tau_step). For tau > 0: G_ab(tau) / (I_a I_b); for tau < 0: G_ba(|tau|) / (I_a I_b).
/// tau = 0 carries the mean of the two one-sided limits, which keeps
/// g_ab(tau) = g_ba(-tau) exact. Throws UndefinedNormalizationError if either
/// line is dark (I < 1e-15 / ps).
CorrelationTrace g2_cross(const SystemParams& p, LineId a, LineId b, double tau_max,
                          double tau_step, TrajectoryMonitor* monitor = nullptr);

/// g1(t) = tr(J^dag e^{L t}[J rho]) / tr(J^dag J rho), J = sum of the line operators.
CorrelationTrace g1(const SystemParams& p, std::span<const LineId> lines,
                    std::span<const double> t_grid);

struct Spectrum {
  std::vector<double> energy;   ///< ueV relative to the laser (rotating frame)
  std::vector<double> density;  ///< ps
  bool truncated = false;       ///< g1 had not decayed below 1e-4 at the last sample
  std::string warning;
};

/// S(E) = 2 Re int_0^inf g1(t) exp(-i E t / hbar) dt (trapezoidal rule) on the
/// given energy grid; peaks sit at the lines' rotating-frame energies and
/// int S dE = 2 pi hbar g1(0).
Spectrum spectrum_from_g1(const CorrelationTrace& g1_trace, std::span<const double> energy_grid);

/// Convolution with a unit-area Gaussian of standard deviation sigma (ps),
/// truncated at 6 sigma; the trace is extended with its end values.
CorrelationTrace convolve_detector(const CorrelationTrace& trace, double sigma);

/// Standard deviation of a Gaussian with the given full width at half maximum.
double fwhm_to_sigma(double fwhm);

}  // namespace cascade
