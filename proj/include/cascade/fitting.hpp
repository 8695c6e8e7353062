#pragma once

#include <span>

namespace cascade {

/// Result of fitting a rising, possibly oscillating trace.
///
/// Monotone model:     B0 + B1 t + C1 exp(-t/tau1) + C2 exp(-t/tau2)
/// Oscillatory model:  monotone model + A exp(-t/tau_d) cos(w t + phi)
///
/// `improvement` is the fraction of the trace's variance explained by the
/// oscillatory term beyond the monotone model: (SSR_mono - SSR_osc) / SST.
struct RabiFit {
  double angular_frequency = 0.0;  ///< w, rad/ps
  double frequency = 0.0;          ///< w / 2 pi, 1/ps
  double damping_time = 0.0;       ///< tau_d, ps
  double amplitude = 0.0;          ///< A, same unit as the trace
  double phase = 0.0;              ///< phi, rad
  double ssr_monotone = 0.0;
  double ssr_oscillatory = 0.0;
  double sst = 0.0;
  double improvement = 0.0;
  int extrema = 0;                 ///< local extrema of the sampled trace
};

/// Fits both models to (t, y); t uniform and ascending, at least 16 samples.
/// Never throws for well-formed input, even on non-oscillating data.
RabiFit fit_oscillation(std::span<const double> t, std::span<const double> y);

/// fit_oscillation, but throws NoOscillationError when the oscillatory term
/// explains less than 5% of the variance or the trace has fewer than two extrema.
RabiFit extract_rabi_frequency(std::span<const double> t, std::span<const double> y);

/// Local extrema of a sampled trace; increments smaller than
/// 1e-9 * max|y| are treated as flat.
int count_extrema(std::span<const double> y);

}  // namespace cascade
