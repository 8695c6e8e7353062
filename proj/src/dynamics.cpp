#include "cascade/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cascade/dressed.hpp"
#include "cascade/errors.hpp"

namespace cascade {

DensityCheck inspect_density_matrix(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw InvalidInputError("inspect_density_matrix: matrix must be square and non-empty");
  }
  DensityCheck c;
  c.trace_error = std::abs(rho.trace() - Complex(1.0));
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
  c.min_eigenvalue = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(sym, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .minCoeff();
  return c;
}

void TrajectoryMonitor::observe(const ComplexMatrix& rho, double reference_trace) {
  const double tr = rho.trace().real();
  const double scale = std::max(std::abs(reference_trace), 1e-300);
  max_trace_drift = std::max(max_trace_drift, std::abs(tr - reference_trace) / scale);
  const ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
  const double lo = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(sym, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
  min_eigenvalue = std::min(min_eigenvalue, lo / scale);
  ++samples;
}

void TrajectoryMonitor::merge(const TrajectoryMonitor& other) {
  max_trace_drift = std::max(max_trace_drift, other.max_trace_drift);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
  samples += other.samples;
}

ComplexMatrix steady_state(const Superoperator& l) {
  const int dim = l.hilbert_dim;
  const auto n = l.matrix.rows();
  if (dim <= 0 || n != static_cast<Eigen::Index>(dim) * dim || l.matrix.cols() != n) {
    throw InvalidInputError("steady_state: superoperator shape does not match its Hilbert dimension");
  }

  const Eigen::JacobiSVD<ComplexMatrix> svd(l.matrix);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(sv(0), 1e-300);
  int null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) < cutoff) ++null_dim;
  }
  if (null_dim > 1) {
    throw NonUniqueSteadyStateError(
        "steady_state: null space of the Liouvillian has dimension " + std::to_string(null_dim),
        null_dim);
  }

  // Replace the first equation by the trace condition tr(rho) = 1.
  ComplexMatrix a = l.matrix;
  a.row(0).setZero();
  for (int i = 0; i < dim; ++i) a(0, i * dim + i) = 1.0;
  ComplexVector b = ComplexVector::Zero(n);
  b(0) = 1.0;
  ComplexMatrix rho = unvectorize(solve_linear(a, b), dim);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return rho;
}

std::vector<ComplexMatrix> evolve(const Superoperator& l, const ComplexMatrix& rho0,
                                  std::span<const double> t_grid, TrajectoryMonitor* monitor) {
  if (rho0.rows() != l.hilbert_dim || rho0.cols() != l.hilbert_dim) {
    throw InvalidInputError("evolve: initial state does not match the superoperator dimension");
  }
  const auto vecs = propagate_ode(l.matrix, vectorize(rho0), t_grid);
  std::vector<ComplexMatrix> out;
  out.reserve(vecs.size());
  const double ref = rho0.trace().real();
  for (const auto& v : vecs) {
    out.push_back(unvectorize(v, l.hilbert_dim));
    if (monitor) monitor->observe(out.back(), ref);
  }
  return out;
}

void PulseShape::validate() const {
  if (!(std::isfinite(duration) && duration > 0.0)) {
    throw InvalidInputError("PulseShape.duration must be > 0 (got " + std::to_string(duration) + ")");
  }
  if (!(std::isfinite(period) && duration < period)) {
    throw InvalidInputError("PulseShape.duration must be shorter than the repetition period (" +
                            std::to_string(duration) + " >= " + std::to_string(period) + ")");
  }
  if (!std::isfinite(start)) throw InvalidInputError("PulseShape.start must be finite");
}

namespace {

ComplexMatrix detector_operator(const SystemParams& p, Side side) {
  const auto catalog = line_catalog(p, dressed_states(p));
  return find_line(catalog, {side, DressedLabel::plus}).op +
         find_line(catalog, {side, DressedLabel::zero}).op;
}

}  // namespace

ComplexMatrix detector_operator_l(const SystemParams& p) { return detector_operator(p, Side::L); }
ComplexMatrix detector_operator_r(const SystemParams& p) { return detector_operator(p, Side::R); }

PulseResponse pulse_response(const SystemParams& p, const PulseShape& pulse,
                             std::span<const double> t_grid, TrajectoryMonitor* monitor) {
  p.validate();
  pulse.validate();
  if (t_grid.empty()) throw InvalidInputError("pulse_response: empty time grid");
  if (t_grid.front() > pulse.start) {
    throw InvalidInputError("pulse_response: time grid must start at or before the pulse onset");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw InvalidInputError("pulse_response: time grid must be strictly ascending");
    }
  }

  SystemParams off = p;
  off.hbar_omega = 0.0;
  const Superoperator l_on = liouvillian(p);
  const Superoperator l_off = liouvillian(off);
  const ComplexMatrix m_l_on = detector_operator_l(p).adjoint() * detector_operator_l(p);
  const ComplexMatrix m_r_on = detector_operator_r(p).adjoint() * detector_operator_r(p);
  const ComplexMatrix m_l_off = detector_operator_l(off).adjoint() * detector_operator_l(off);
  const ComplexMatrix m_r_off = detector_operator_r(off).adjoint() * detector_operator_r(off);

  PulseResponse out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.i_l.reserve(t_grid.size());
  out.i_r.reserve(t_grid.size());

  auto record = [&](double t, const ComplexMatrix& rho) {
    const bool on = pulse.drive_on(t);
    out.i_l.push_back(((on ? m_l_on : m_l_off) * rho).trace().real());
    out.i_r.push_back(((on ? m_r_on : m_r_off) * rho).trace().real());
  };

  ComplexMatrix rho = steady_state(l_off);
  double t_now = t_grid.front();
  const double ref_trace = rho.trace().real();
  const double t_on = pulse.start;
  const double t_off = pulse.start + pulse.duration;

  // Propagate segment by segment, each with a constant generator, stopping at
  // the pulse edges.
  std::size_t i = 0;
  while (i < t_grid.size()) {
    double seg_end;
    bool on;
    if (t_now < t_on) {
      seg_end = t_on;
      on = false;
    } else if (t_now < t_off) {
      seg_end = t_off;
      on = true;
    } else {
      seg_end = std::numeric_limits<double>::infinity();
      on = false;
    }
    std::vector<double> sub{t_now};
    std::size_t j = i;
    while (j < t_grid.size() && t_grid[j] <= seg_end) {
      if (t_grid[j] > t_now) sub.push_back(t_grid[j]);
      ++j;
    }
    const bool ends_at_break = j < t_grid.size() && sub.back() < seg_end;
    if (ends_at_break) sub.push_back(seg_end);

    const auto states = evolve(on ? l_on : l_off, rho, sub);
    std::size_t k = 0;
    for (std::size_t g = i; g < j; ++g) {
      while (sub[k] < t_grid[g]) ++k;
      if (monitor) monitor->observe(states[k], ref_trace);
      record(t_grid[g], states[k]);
    }
    rho = states.back();
    t_now = sub.back();
    i = j;
    if (!std::isfinite(seg_end)) break;
  }
  return out;
}

}  // namespace cascade
