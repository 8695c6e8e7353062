#include "cascade/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

namespace {

constexpr double kDegenerateGap = 1e-9;  // ueV

// Block indices of the driven subspace.
constexpr int kBlockG = 0;
constexpr int kBlockV = 1;
constexpr int kBlockXX = 2;

Eigen::Matrix3cd driven_block(const SystemParams& p) {
  const ComplexMatrix h = hamiltonian_rf(p);
  constexpr std::array<int, 3> idx{index_of(BareState::G), index_of(BareState::V),
                                   index_of(BareState::XX)};
  Eigen::Matrix3cd block;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) block(i, j) = h(idx[i], idx[j]);
  }
  return block;
}

// Global phase: G amplitude real positive, else XX, else V.
Eigen::Vector3cd fix_phase(Eigen::Vector3cd v) {
  v.normalize();
  for (int k : {kBlockG, kBlockXX, kBlockV}) {
    if (std::abs(v(k)) > 1e-7) {
      v *= std::conj(v(k)) / std::abs(v(k));
      return v;
    }
  }
  return v;
}

struct RawState {
  double energy;
  double tie_break;
  Eigen::Vector3cd vec;
};

// Undriven block: bare states, with degenerate pairs resolved by the leading
// order of perturbation theory in the coupling (first order if the pair is
// directly coupled, second order through the third state otherwise). This is
// the hbar_omega -> 0+ limit of the driven eigenstates.
std::vector<RawState> undriven_states(const SystemParams& p) {
  const std::array<double, 3> e{0.0, p.detuning_v(), p.detuning_xx()};
  Eigen::Matrix3d coupling = Eigen::Matrix3d::Zero();
  coupling(kBlockG, kBlockV) = coupling(kBlockV, kBlockG) = 1.0;
  coupling(kBlockV, kBlockXX) = coupling(kBlockXX, kBlockV) = 1.0;

  std::vector<RawState> out;
  std::array<bool, 3> done{false, false, false};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (done[i] || done[j] || std::abs(e[i] - e[j]) >= kDegenerateGap) continue;
      const int k = 3 - i - j;
      Eigen::Matrix2d m;
      if (coupling(i, j) != 0.0) {
        m << coupling(i, i), coupling(i, j), coupling(j, i), coupling(j, j);
      } else {
        const double denom = e[i] - e[k];
        m << coupling(i, k) * coupling(k, i) / denom, coupling(i, k) * coupling(k, j) / denom,
            coupling(j, k) * coupling(k, i) / denom, coupling(j, k) * coupling(k, j) / denom;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
        v(i) = es.eigenvectors()(0, c);
        v(j) = es.eigenvectors()(1, c);
        out.push_back({e[i], es.eigenvalues()(c), v});
      }
      done[i] = done[j] = true;
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (done[i]) continue;
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
    v(i) = 1.0;
    out.push_back({e[i], 0.0, v});
  }
  return out;
}

std::vector<RawState> raw_states(const SystemParams& p) {
  if (p.hbar_omega == 0.0) return undriven_states(p);
  const auto eig = hermitian_eigen(driven_block(p));
  std::vector<RawState> out;
  for (int c = 0; c < 3; ++c) {
    out.push_back({eig.eigenvalues(c), 0.0, eig.eigenvectors.col(c)});
  }
  return out;
}

DressedSet label_by_order(std::vector<RawState> raw) {
  std::sort(raw.begin(), raw.end(), [](const RawState& a, const RawState& b) {
    if (std::abs(a.energy - b.energy) >= kDegenerateGap) return a.energy < b.energy;
    return a.tie_break < b.tie_break;
  });
  constexpr std::array<DressedLabel, 3> order{DressedLabel::zero, DressedLabel::plus,
                                              DressedLabel::minus};
  DressedSet set;
  for (int r = 0; r < 3; ++r) {
    auto& s = set.states[static_cast<std::size_t>(order[r])];
    s.label = order[r];
    s.energy = raw[r].energy;
    s.components = fix_phase(raw[r].vec);
  }
  return set;
}

SystemParams interpolate(const SystemParams& a, const SystemParams& b, double s) {
  auto mix = [s](double x, double y) { return x + s * (y - x); };
  SystemParams p = b;
  p.delta_Eb = mix(a.delta_Eb, b.delta_Eb);
  p.delta_fss = mix(a.delta_fss, b.delta_fss);
  p.hbar_omega = mix(a.hbar_omega, b.hbar_omega);
  p.delta_laser = mix(a.delta_laser, b.delta_laser);
  return s >= 1.0 ? b : p;
}

// Best assignment of new states to previous labels; returns the smallest matched
// squared overlap.
double match(const DressedSet& previous, const std::vector<RawState>& raw,
             std::array<int, 3>& assignment) {
  std::array<int, 3> perm{0, 1, 2};
  double best_total = -1.0;
  double best_min = 0.0;
  do {
    double total = 0.0;
    double worst = 1.0;
    for (int l = 0; l < 3; ++l) {
      const double o = std::norm(previous.states[l].components.dot(raw[perm[l]].vec));
      total += o;
      worst = std::min(worst, o);
    }
    if (total > best_total) {
      best_total = total;
      best_min = worst;
      assignment = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_min;
}

ComplexMatrix steady_state_at(const SystemParams& p, const char* swept, double value) {
  try {
    return steady_state(liouvillian(p));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " (at " + swept + " = " + std::to_string(value) +
                         " ueV)");
  }
}

}  // namespace

std::string_view label_name(DressedLabel label) {
  switch (label) {
    case DressedLabel::plus: return "plus";
    case DressedLabel::zero: return "zero";
    case DressedLabel::minus: return "minus";
  }
  return "?";
}

std::string LineId::name() const {
  return std::string(side == Side::L ? "L_" : "R_") + std::string(label_name(label));
}

LineId LineId::parse(std::string_view text) {
  for (Side s : {Side::L, Side::R}) {
    for (DressedLabel l : {DressedLabel::plus, DressedLabel::zero, DressedLabel::minus}) {
      const LineId id{s, l};
      if (id.name() == text) return id;
    }
  }
  throw InvalidInputError("unknown line '" + std::string(text) +
                          "' (expected L_plus, L_zero, L_minus, R_plus, R_zero or R_minus)");
}

ComplexVector DressedState::embedded() const {
  ComplexVector v = ComplexVector::Zero(kHilbertDim);
  v(index_of(BareState::G)) = components(kBlockG);
  v(index_of(BareState::V)) = components(kBlockV);
  v(index_of(BareState::XX)) = components(kBlockXX);
  return v;
}

DressedSet dressed_states(const SystemParams& p) {
  p.validate();
  return label_by_order(raw_states(p));
}

DressedSet continue_dressed_states(const SystemParams& previous_params, const DressedSet& previous,
                                   const SystemParams& target) {
  target.validate();
  DressedSet current = previous;
  double s = 0.0;
  double ds = 1.0;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + ds);
    const SystemParams p = interpolate(previous_params, target, s_next);
    auto raw = raw_states(p);
    std::array<int, 3> assignment{};
    const double worst = match(current, raw, assignment);
    if (worst < 0.75) {
      ds *= 0.5;
      if (ds < 1e-12) {
        // Unresolvable within double precision: fall back to the adiabatic order.
        return dressed_states(target);
      }
      continue;
    }
    for (int l = 0; l < 3; ++l) {
      auto& st = current.states[l];
      st.energy = raw[assignment[l]].energy;
      st.components = fix_phase(raw[assignment[l]].vec);
    }
    s = s_next;
    ds = std::min(1.0, 2.0 * ds);
  }
  return current;
}

std::vector<FilteredJump> line_catalog(const SystemParams& p, const DressedSet& d) {
  p.validate();
  const double l_amp = std::sqrt(1.0 / (2.0 * p.tau_xx));
  const double r_amp = std::sqrt(1.0 / p.tau_x);
  const double e_l = p.laser_energy();
  const double e_h = p.h_exciton_energy();
  ComplexVector h = ComplexVector::Zero(kHilbertDim);
  h(index_of(BareState::H)) = 1.0;

  std::vector<FilteredJump> out;
  for (Side side : {Side::L, Side::R}) {
    for (DressedLabel label : {DressedLabel::plus, DressedLabel::zero, DressedLabel::minus}) {
      const DressedState& st = d[label];
      const ComplexVector ket = st.embedded();
      FilteredJump j;
      j.line = {side, label};
      if (side == Side::L) {
        j.op = l_amp * ket(index_of(BareState::XX)) * h * ket.adjoint();
        j.lab_energy = 2.0 * e_l + st.energy - e_h;
      } else {
        j.op = r_amp * std::conj(ket(index_of(BareState::G))) * ket * h.adjoint();
        j.lab_energy = e_h - st.energy;
      }
      j.frame_energy = j.lab_energy - e_l;
      out.push_back(std::move(j));
    }
  }
  return out;
}

const FilteredJump& find_line(std::span<const FilteredJump> catalog, LineId id) {
  for (const auto& j : catalog) {
    if (j.line == id) return j;
  }
  throw InvalidInputError("line " + id.name() + " is not in the catalog");
}

std::map<LineId, double> line_intensities(std::span<const FilteredJump> catalog,
                                          const ComplexMatrix& rho) {
  std::map<LineId, double> out;
  for (const auto& j : catalog) {
    out[j.line] = (j.op.adjoint() * j.op * rho).trace().real();
  }
  return out;
}

double steady_line_intensity(const SystemParams& p, const ComplexMatrix& j, const ComplexMatrix& rho_ss) {
  if (p.hbar_omega == 0.0) return 0.0;
  return (j.adjoint() * j * rho_ss).trace().real();
}

std::map<LineId, double> line_intensities(const SystemParams& p, const ComplexMatrix& rho_ss) {
  std::map<LineId, double> out;
  for (const auto& j : line_catalog(p, dressed_states(p))) out[j.line] = steady_line_intensity(p, j.op, rho_ss);
  return out;
}

std::vector<AnticrossingRow> anticrossing_map(const SystemParams& p,
                                              std::span<const double> detuning_grid,
                                              unsigned jobs) {
  if (detuning_grid.empty()) throw InvalidInputError("anticrossing_map: empty detuning grid");
  const std::size_t n = detuning_grid.size();
  std::vector<SystemParams> points(n, p);
  for (std::size_t i = 0; i < n; ++i) points[i].delta_laser = detuning_grid[i];

  std::vector<DressedSet> sets;
  sets.reserve(n);
  sets.push_back(dressed_states(points[0]));
  for (std::size_t i = 1; i < n; ++i) {
    sets.push_back(continue_dressed_states(points[i - 1], sets.back(), points[i]));
  }

  std::vector<AnticrossingRow> rows(6 * n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto catalog = line_catalog(points[i], sets[i]);
    const auto rho = steady_state_at(points[i], "delta_laser", detuning_grid[i]);
    for (std::size_t k = 0; k < catalog.size(); ++k) {
      rows[6 * i + k] = {detuning_grid[i], catalog[k].line, catalog[k].lab_energy,
                         steady_line_intensity(points[i], catalog[k].op, rho)};
    }
  });
  return rows;
}

std::vector<PowerMapRow> power_map(const SystemParams& p, std::span<const double> hbar_omega_grid,
                                   unsigned jobs) {
  if (hbar_omega_grid.empty()) throw InvalidInputError("power_map: empty drive grid");
  const std::size_t n = hbar_omega_grid.size();
  std::vector<SystemParams> points(n, p);
  for (std::size_t i = 0; i < n; ++i) points[i].hbar_omega = hbar_omega_grid[i];

  std::vector<DressedSet> sets;
  sets.reserve(n);
  sets.push_back(dressed_states(points[0]));
  for (std::size_t i = 1; i < n; ++i) {
    sets.push_back(continue_dressed_states(points[i - 1], sets.back(), points[i]));
  }

  std::vector<PowerMapRow> rows(6 * n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto catalog = line_catalog(points[i], sets[i]);
    const auto rho = steady_state_at(points[i], "hbar_omega", hbar_omega_grid[i]);
    for (std::size_t k = 0; k < catalog.size(); ++k) {
      rows[6 * i + k] = {hbar_omega_grid[i], catalog[k].line, catalog[k].lab_energy,
                         steady_line_intensity(points[i], catalog[k].op, rho)};
    }
  });
  return rows;
}

}  // namespace cascade
