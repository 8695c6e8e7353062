#include "cascade/fitting.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

// Nelder-Mead simplex minimization (GSL nmsimplex2).
std::vector<double> minimize_simplex(const Objective& f, std::vector<double> x0,
                                     const std::vector<double>& step, int max_iter) {
  const std::size_t n = x0.size();
  gsl_multimin_function fn;
  fn.n = n;
  fn.params = const_cast<Objective*>(&f);
  fn.f = [](const gsl_vector* v, void* params) {
    const auto& obj = *static_cast<const Objective*>(params);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    const double r = obj(x);
    return std::isfinite(r) ? r : std::numeric_limits<double>::max();
  };

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(ss, i, step[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
  }
  for (std::size_t i = 0; i < n; ++i) x0[i] = gsl_vector_get(s->x, i);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return x0;
}

struct LinearFit {
  double ssr;
  Eigen::VectorXd coeffs;
};

class ModelFitter {
 public:
  ModelFitter(std::span<const double> t, std::span<const double> y)
      : t_(t.size()), y_(t.size()) {
    span_ = t.back() - t.front();
    for (std::size_t i = 0; i < t.size(); ++i) {
      t_(i) = t[i] - t.front();
      y_(i) = y[i];
    }
  }

  double span() const { return span_; }

  // Variable projection: for fixed decay times and frequency the model is linear.
  LinearFit fit(double tau1, double tau2, double tau_d, double omega, bool oscillating) const {
    const Eigen::Index n = t_.size();
    Eigen::MatrixXd x(n, oscillating ? 6 : 4);
    x.col(0).setOnes();
    x.col(1) = t_ / span_;
    x.col(2) = (-t_ / tau1).array().exp();
    x.col(3) = (-t_ / tau2).array().exp();
    if (oscillating) {
      const Eigen::ArrayXd env = (-t_ / tau_d).array().exp();
      x.col(4) = env * (omega * t_).array().cos();
      x.col(5) = env * (omega * t_).array().sin();
    }
    LinearFit out;
    out.coeffs = x.colPivHouseholderQr().solve(y_);
    out.ssr = (y_ - x * out.coeffs).squaredNorm();
    return out;
  }

  double sst() const { return (y_.array() - y_.mean()).square().sum(); }

 private:
  Eigen::VectorXd t_;
  Eigen::VectorXd y_;
  double span_ = 0.0;
};

}  // namespace

int count_extrema(std::span<const double> y) {
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  const double flat = 1e-9 * scale;
  int extrema = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double d = y[i] - y[i - 1];
    if (std::abs(d) <= flat) continue;
    const int sign = d > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++extrema;
    last_sign = sign;
  }
  return extrema;
}

RabiFit fit_oscillation(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw InvalidInputError("fit_oscillation: t and y lengths differ");
  if (t.size() < 16) throw InvalidInputError("fit_oscillation: need at least 16 samples");
  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double d = t[i] - t[i - 1];
    if (!(d > 0.0) || std::abs(d - dt) > 1e-6 * dt) {
      throw InvalidInputError("fit_oscillation: time grid must be uniform and ascending");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidInputError("fit_oscillation: trace contains non-finite values");
  }

  const ModelFitter fitter(t, y);
  const double span = fitter.span();

  constexpr int kTauCount = 16;
  std::vector<double> taus(kTauCount);
  for (int i = 0; i < kTauCount; ++i) {
    taus[i] = span / 500.0 * std::pow(1000.0, static_cast<double>(i) / (kTauCount - 1));
  }

  // Monotone model: grid over ordered decay-time pairs, then simplex refinement.
  double best_mono = std::numeric_limits<double>::infinity();
  std::vector<double> mono_x{0.0, 0.0};
  for (int a = 0; a < kTauCount; ++a) {
    for (int b = a + 1; b < kTauCount; ++b) {
      const double r = fitter.fit(taus[a], taus[b], 1.0, 0.0, false).ssr;
      if (r < best_mono) {
        best_mono = r;
        mono_x = {std::log(taus[a]), std::log(taus[b])};
      }
    }
  }
  const Objective mono_obj = [&](const std::vector<double>& x) {
    return fitter.fit(std::exp(x[0]), std::exp(x[1]), 1.0, 0.0, false).ssr;
  };
  mono_x = minimize_simplex(mono_obj, mono_x, {0.3, 0.3}, 4000);
  const double ssr_mono = std::min(best_mono, mono_obj(mono_x));

  // Oscillatory model, nested on the monotone optimum.
  const double w_lo = 2.0 * std::numbers::pi / span;
  const double w_hi = std::numbers::pi / (10.0 * dt);
  constexpr int kOmegaCount = 60;
  double best_osc = std::numeric_limits<double>::infinity();
  std::vector<double> osc_x;
  for (int k = 0; k < kOmegaCount; ++k) {
    const double w = w_lo + (w_hi - w_lo) * k / (kOmegaCount - 1);
    for (int d = 0; d < kTauCount; d += 2) {
      const double r =
          fitter.fit(std::exp(mono_x[0]), std::exp(mono_x[1]), taus[d], w, true).ssr;
      if (r < best_osc) {
        best_osc = r;
        osc_x = {mono_x[0], mono_x[1], std::log(taus[d]), w};
      }
    }
  }
  const Objective osc_obj = [&](const std::vector<double>& x) {
    return fitter.fit(std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), x[3], true).ssr;
  };
  const double w_step = 0.5 * (w_hi - w_lo) / (kOmegaCount - 1);
  std::vector<double> refined = minimize_simplex(osc_obj, osc_x, {0.3, 0.3, 0.3, w_step}, 8000);
  if (osc_obj(refined) < best_osc) osc_x = refined;
  // The nested model can never do worse than the monotone one.
  const double ssr_osc = std::min(osc_obj(osc_x), ssr_mono);

  const LinearFit lin = fitter.fit(std::exp(osc_x[0]), std::exp(osc_x[1]), std::exp(osc_x[2]),
                                   osc_x[3], true);
  RabiFit out;
  out.angular_frequency = std::abs(osc_x[3]);
  out.frequency = out.angular_frequency / (2.0 * std::numbers::pi);
  out.damping_time = std::exp(osc_x[2]);
  out.amplitude = std::hypot(lin.coeffs(4), lin.coeffs(5));
  out.phase = std::atan2(-lin.coeffs(5), lin.coeffs(4));
  out.ssr_monotone = ssr_mono;
  out.ssr_oscillatory = ssr_osc;
  out.sst = fitter.sst();
  out.improvement = out.sst > 0.0 ? (ssr_mono - ssr_osc) / out.sst : 0.0;
  out.extrema = count_extrema(y);
  return out;
}

RabiFit extract_rabi_frequency(std::span<const double> t, std::span<const double> y) {
  RabiFit fit = fit_oscillation(t, y);
  if (fit.improvement < 0.05 || fit.extrema < 2) {
    throw NoOscillationError("extract_rabi_frequency: no oscillation detected (improvement " +
                                 std::to_string(fit.improvement) + ", " +
                                 std::to_string(fit.extrema) + " extrema)",
                             fit.improvement);
  }
  return fit;
}

}  // namespace cascade
