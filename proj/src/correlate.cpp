#include "cascade/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

constexpr double kDarkIntensity = 1e-15;  // 1/ps

void require_ascending(std::span<const double> grid, const char* who) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw InvalidInputError(std::string(who) + ": grid must be strictly ascending (index " +
                              std::to_string(i) + ")");
    }
  }
}

// Propagates X from tau = 0 and returns tr(M X(tau)) at every grid time.
std::vector<Complex> regress(const Superoperator& l, const ComplexMatrix& x0, const ComplexMatrix& m,
                             std::span<const double> grid, TrajectoryMonitor* monitor,
                             bool positive_state) {
  require_ascending(grid, "regression");
  if (grid.empty()) return {};
  if (grid.front() < 0.0) throw InvalidInputError("regression: delays must be >= 0");
  std::vector<double> full;
  const bool prepend = grid.front() > 0.0;
  if (prepend) full.push_back(0.0);
  full.insert(full.end(), grid.begin(), grid.end());

  const auto vecs = propagate_ode(l.matrix, vectorize(x0), full);
  const double ref = x0.trace().real();
  std::vector<Complex> out;
  out.reserve(grid.size());
  for (std::size_t i = prepend ? 1 : 0; i < vecs.size(); ++i) {
    const ComplexMatrix x = unvectorize(vecs[i], l.hilbert_dim);
    if (monitor && positive_state && ref > 1e-300) monitor->observe(x, ref);
    out.push_back((m * x).trace());
  }
  return out;
}

bool is_uniform(std::span<const double> grid, double& step) {
  if (grid.size() < 2) {
    step = 0.0;
    return true;
  }
  step = grid[1] - grid[0];
  if (!(step > 0.0)) return false;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(step))) return false;
  }
  return true;
}

}  // namespace

std::vector<double> CorrelationTrace::real_values() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

double CorrelationTrace::real_at(double delay) const {
  if (delay_ps.empty() || delay < delay_ps.front() || delay > delay_ps.back()) {
    throw InvalidInputError("CorrelationTrace::real_at: delay " + std::to_string(delay) +
                            " outside the sampled grid");
  }
  const auto it = std::lower_bound(delay_ps.begin(), delay_ps.end(), delay);
  const auto i = static_cast<std::size_t>(it - delay_ps.begin());
  if (delay_ps[i] == delay || i == 0) return values[i].real();
  const double w = (delay - delay_ps[i - 1]) / (delay_ps[i] - delay_ps[i - 1]);
  return (1.0 - w) * values[i - 1].real() + w * values[i].real();
}

std::vector<double> qrt_two_time(const Superoperator& l, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const ComplexMatrix& rho_ss,
                                 std::span<const double> tau_grid, TrajectoryMonitor* monitor) {
  const ComplexMatrix x0 = a * rho_ss * a.adjoint();
  const ComplexMatrix m = b.adjoint() * b;
  const auto raw = regress(l, x0, m, tau_grid, monitor, true);
  // |tr(M X)| <= ||M||_2 tr(X) bounds the attainable magnitude.
  const double bound = m.operatorNorm() * std::abs(x0.trace());
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::abs(raw[i].imag()) > 1e-10 * std::max(std::abs(raw[i]), bound) + 1e-300) {
      throw NumericalError("qrt_two_time: correlation has imaginary part " +
                           std::to_string(raw[i].imag()) + " at tau = " +
                           std::to_string(tau_grid[i]) + " ps");
    }
    out[i] = raw[i].real();
  }
  return out;
}

CorrelationTrace g2_cross(const SystemParams& p, LineId a, LineId b, double tau_max,
                          double tau_step, TrajectoryMonitor* monitor) {
  if (!(tau_step > 0.0) || !(tau_max >= 0.0) || !std::isfinite(tau_max)) {
    throw InvalidInputError("g2_cross: need tau_step > 0 and finite tau_max >= 0");
  }
  const auto catalog = line_catalog(p, dressed_states(p));
  const Superoperator l = liouvillian(p);
  const ComplexMatrix rho = steady_state(l);
  const ComplexMatrix& ja = find_line(catalog, a).op;
  const ComplexMatrix& jb = find_line(catalog, b).op;
  const double ia = steady_line_intensity(p, ja, rho);
  const double ib = steady_line_intensity(p, jb, rho);
  for (const auto& [id, value] : {std::pair{a, ia}, std::pair{b, ib}}) {
    if (value < kDarkIntensity) {
      throw UndefinedNormalizationError("g2_cross: line " + id.name() +
                                            " is dark in the steady state (intensity " +
                                            std::to_string(value) + " / ps)",
                                        id.name());
    }
  }

  const auto n = static_cast<std::size_t>(std::llround(tau_max / tau_step));
  const auto positive = uniform_grid(0.0, tau_step, n + 1);
  const auto g_ab = qrt_two_time(l, ja, jb, rho, positive, monitor);
  const auto g_ba = qrt_two_time(l, jb, ja, rho, positive, monitor);
  const double norm = ia * ib;

  CorrelationTrace out;
  out.normalization = Normalization::normalized;
  out.delay_ps.reserve(2 * n + 1);
  out.values.reserve(2 * n + 1);
  for (std::size_t k = n; k >= 1; --k) {
    out.delay_ps.push_back(-static_cast<double>(k) * tau_step);
    out.values.emplace_back(g_ba[k] / norm);
  }
  out.delay_ps.push_back(0.0);
  out.values.emplace_back(0.5 * (g_ab[0] + g_ba[0]) / norm);
  for (std::size_t k = 1; k <= n; ++k) {
    out.delay_ps.push_back(static_cast<double>(k) * tau_step);
    out.values.emplace_back(g_ab[k] / norm);
  }
  return out;
}

CorrelationTrace g1(const SystemParams& p, std::span<const LineId> lines,
                    std::span<const double> t_grid) {
  if (lines.empty()) throw InvalidInputError("g1: empty line set");
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw InvalidInputError("g1: time grid must start at 0");
  }
  const auto catalog = line_catalog(p, dressed_states(p));
  const Superoperator l = liouvillian(p);
  const ComplexMatrix rho = steady_state(l);
  ComplexMatrix j = ComplexMatrix::Zero(kHilbertDim, kHilbertDim);
  std::string names;
  for (const auto& id : lines) {
    j += find_line(catalog, id).op;
    names += (names.empty() ? "" : "+") + id.name();
  }
  const double norm = steady_line_intensity(p, j, rho);
  if (norm < kDarkIntensity) {
    throw UndefinedNormalizationError("g1: line set " + names + " is dark in the steady state", names);
  }
  // J rho is not a state, so its propagation is not monitored.
  const auto raw = regress(l, j * rho, j.adjoint(), t_grid, nullptr, false);
  CorrelationTrace out;
  out.normalization = Normalization::normalized;
  out.delay_ps.assign(t_grid.begin(), t_grid.end());
  out.values.reserve(raw.size());
  for (const auto& v : raw) out.values.push_back(v / norm);
  return out;
}

Spectrum spectrum_from_g1(const CorrelationTrace& g1_trace, std::span<const double> energy_grid) {
  const auto& t = g1_trace.delay_ps;
  if (t.size() < 2 || t.front() != 0.0) {
    throw InvalidInputError("spectrum_from_g1: g1 must be sampled from t = 0 on at least 2 points");
  }
  require_ascending(t, "spectrum_from_g1");
  require_ascending(energy_grid, "spectrum_from_g1");

  // Trapezoidal weights.
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = t[i] - t[i - 1];
    w[i - 1] += 0.5 * h;
    w[i] += 0.5 * h;
  }

  Spectrum out;
  out.energy.assign(energy_grid.begin(), energy_grid.end());
  out.density.reserve(energy_grid.size());
  for (double e : energy_grid) {
    const double k = e / kHbar;
    Complex acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      acc += w[i] * g1_trace.values[i] * std::polar(1.0, -k * t[i]);
    }
    out.density.push_back(2.0 * acc.real());
  }
  const double tail = std::abs(g1_trace.values.back());
  if (tail > 1e-4) {
    out.truncated = true;
    out.warning = "g1 has not decayed below 1e-4 at t = " + std::to_string(t.back()) +
                  " ps (|g1| = " + std::to_string(tail) + "); the spectrum is truncated";
  }
  return out;
}

CorrelationTrace convolve_detector(const CorrelationTrace& trace, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidInputError("convolve_detector: sigma must be finite and >= 0");
  }
  double step = 0.0;
  if (!is_uniform(trace.delay_ps, step)) {
    throw InvalidInputError("convolve_detector: delay grid is not uniform");
  }
  CorrelationTrace out = trace;
  out.convolved_sigma = sigma;
  if (sigma == 0.0 || trace.values.size() < 2) return out;

  const auto half = static_cast<long>(std::floor(6.0 * sigma / step));
  std::vector<double> kernel(2 * half + 1);
  double area = 0.0;
  for (long k = -half; k <= half; ++k) {
    const double x = static_cast<double>(k) * step / sigma;
    kernel[k + half] = std::exp(-0.5 * x * x);
    area += kernel[k + half];
  }
  for (double& k : kernel) k /= area;

  const long n = static_cast<long>(trace.values.size());
  for (long i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (long k = -half; k <= half; ++k) {
      const long j = std::clamp(i - k, 0L, n - 1);
      acc += kernel[k + half] * trace.values[j];
    }
    out.values[i] = acc;
  }
  return out;
}

double fwhm_to_sigma(double fwhm) {
  if (!(fwhm >= 0.0) || !std::isfinite(fwhm)) {
    throw InvalidInputError("fwhm_to_sigma: width must be finite and >= 0");
  }
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

}  // namespace cascade
