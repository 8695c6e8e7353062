#include <algorithm>
#include <cmath>

#include "cascade/dressed.hpp"
#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cascade;
using test_support::max_abs;

namespace {

constexpr std::array<DressedLabel, 3> kLabels{DressedLabel::plus, DressedLabel::zero, DressedLabel::minus};

SystemParams at(double hbar_omega, double delta_laser) {
  SystemParams p;
  p.hbar_omega = hbar_omega;
  p.delta_laser = delta_laser;
  return p;
}

double exact_zero_energy(const SystemParams& p) {
  const double dv = p.detuning_v();
  return dv / 2.0 - std::sqrt(dv * dv / 4.0 + p.hbar_omega * p.hbar_omega / 2.0);
}

}  // namespace

TEST_SUITE("dressed") {
  TEST_CASE("LineId names round-trip") {
    for (Side s : {Side::L, Side::R}) {
      for (auto l : kLabels) {
        const LineId id{s, l};
        CHECK(LineId::parse(id.name()) == id);
      }
    }
    CHECK(LineId{Side::R, DressedLabel::zero}.name() == "R_zero");
    CHECK_THROWS_AS(LineId::parse("L0"), InvalidInputError);
  }

  TEST_CASE("resonant plus state is the Rabi-independent antisymmetric G/XX combination") {
    for (double omega : {1e-3, 1.0, 50.0, 2000.0 / 13.0, 400.0}) {
      const auto d = dressed_states(at(omega, 0.0));
      const auto& plus = d[DressedLabel::plus];
      CHECK(std::abs(plus.energy) < 1e-9);
      CHECK(std::abs(plus.components(0) - 1.0 / std::sqrt(2.0)) < 1e-9);
      CHECK(std::abs(plus.components(1)) < 1e-9);
      CHECK(std::abs(plus.components(2) + 1.0 / std::sqrt(2.0)) < 1e-9);
    }
  }

  TEST_CASE("resonant zero state energy: closed form and weak-drive expansion") {
    for (double omega : {20.0, 2000.0 / 13.0, 300.0}) {
      const auto p = at(omega, 0.0);
      const auto d = dressed_states(p);
      CHECK(d[DressedLabel::zero].energy == doctest::Approx(exact_zero_energy(p)).epsilon(1e-12));
    }
    const auto p = at(20.0, 0.0);
    CHECK(dressed_states(p)[DressedLabel::zero].energy ==
          doctest::Approx(-p.hbar_omega * p.hbar_omega / p.delta_Eb).epsilon(1e-3));
  }

  TEST_CASE("undriven resonant block: eigenvalues {0, 0, dEb/2} and weak-drive labels") {
    const auto d = dressed_states(at(0.0, 0.0));
    std::vector<double> e;
    for (auto l : kLabels) e.push_back(d[l].energy);
    std::sort(e.begin(), e.end());
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 1000.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(max_abs(d[DressedLabel::plus].components - Eigen::Vector3cd(s, 0.0, -s)) < 1e-15);
    CHECK(max_abs(d[DressedLabel::zero].components - Eigen::Vector3cd(s, 0.0, s)) < 1e-15);
    CHECK(max_abs(d[DressedLabel::minus].components - Eigen::Vector3cd(0.0, 1.0, 0.0)) < 1e-15);
  }

  TEST_CASE("weak-drive limit is continuous with the driven labels") {
    for (double dl : {-500.0, -63.0, 0.0, 52.0, 500.0, 1000.0}) {
      const auto d0 = dressed_states(at(0.0, dl));
      const auto d1 = dressed_states(at(1e-3, dl));
      for (auto l : kLabels) {
        CHECK(std::norm(d0[l].components.dot(d1[l].components)) > 0.999);
      }
    }
  }

  TEST_CASE("orthonormality over a parameter grid") {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const auto d = dressed_states(at(20.0 * i, -200.0 + 20.0 * j));
        Eigen::Matrix3cd v;
        for (int k = 0; k < 3; ++k) v.col(k) = d.states[k].components;
        worst = std::max(worst, max_abs(v.adjoint() * v - Eigen::Matrix3cd::Identity()));
      }
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("labels follow adiabatic continuation along detuning and drive sweeps") {
    // Overlap-based continuation from the resonance must agree with the labels
    // dressed_states assigns directly.
    for (double omega : {0.0, 20.0, 2000.0 / 13.0, 400.0}) {
      SystemParams prev = at(omega, 0.0);
      DressedSet set = dressed_states(prev);
      for (int k = 1; k <= 60; ++k) {
        const SystemParams next = at(omega, -5.0 * k);
        set = continue_dressed_states(prev, set, next);
        prev = next;
      }
      const auto direct = dressed_states(prev);
      for (auto l : kLabels) CHECK(std::norm(set[l].components.dot(direct[l].components)) > 1 - 1e-9);
    }
    // Sweep the drive up from zero at the detuned point.
    SystemParams prev = at(0.0, -63.0);
    DressedSet set = dressed_states(prev);
    for (int k = 1; k <= 40; ++k) {
      const SystemParams next = at(10.0 * k, -63.0);
      set = continue_dressed_states(prev, set, next);
      prev = next;
    }
    const auto direct = dressed_states(prev);
    for (auto l : kLabels) CHECK(std::norm(set[l].components.dot(direct[l].components)) > 1 - 1e-9);
  }

  TEST_CASE("line catalog: undriven resonance reproduces the bare cascade lines") {
    const auto p = at(0.0, 0.0);
    const auto cat = line_catalog(p, dressed_states(p));
    REQUIRE(cat.size() == 6);
    CHECK(cat[0].line.name() == "L_plus");
    CHECK(cat[5].line.name() == "R_minus");
    const double e_h = p.e_x + p.delta_fss;
    CHECK(find_line(cat, LineId::parse("R_plus")).lab_energy == doctest::Approx(e_h).epsilon(1e-15));
    // Biexciton photon leaving the H exciton behind: E_XX - E_H.
    CHECK(find_line(cat, LineId::parse("L_plus")).lab_energy ==
          doctest::Approx(p.biexciton_energy() - e_h).epsilon(1e-15));
    for (const auto& j : cat) CHECK(j.frame_energy == doctest::Approx(j.lab_energy - p.laser_energy()));
  }

  TEST_CASE("line catalog: pair energy conservation for every label") {
    for (double dl = -100.0; dl <= 100.0; dl += 10.0) {
      const auto p = at(2000.0 / 13.0, dl);
      const auto cat = line_catalog(p, dressed_states(p));
      for (auto l : kLabels) {
        const double sum = find_line(cat, {Side::L, l}).lab_energy + find_line(cat, {Side::R, l}).lab_energy;
        CHECK(sum == 2.0 * p.laser_energy());
      }
    }
  }

  TEST_CASE("line catalog: plus lines fixed, zero lines shift by (hbar Omega)^2 / dEb") {
    const auto p0 = at(0.0, 0.0);
    const auto c0 = line_catalog(p0, dressed_states(p0));
    for (double omega : {10.0, 20.0, 40.0}) {
      const auto p = at(omega, 0.0);
      const auto c = line_catalog(p, dressed_states(p));
      const double shift = omega * omega / p.delta_Eb;
      auto e = [](const auto& cat, const char* name) { return find_line(cat, LineId::parse(name)).lab_energy; };
      CHECK(e(c, "L_plus") == e(c0, "L_plus"));
      CHECK(e(c, "R_plus") == e(c0, "R_plus"));
      // The zero state moves down in the rotating frame, so its R line moves up.
      CHECK((e(c, "R_zero") - e(c0, "R_zero")) / shift == doctest::Approx(1.0).epsilon(2e-3));
      CHECK((e(c, "L_zero") - e(c0, "L_zero")) / shift == doctest::Approx(-1.0).epsilon(2e-3));
    }
  }

  TEST_CASE("filtered jumps: dressed orthogonality and completeness") {
    for (double dl : {-63.0, 0.0, 40.0}) {
      const auto p = at(2000.0 / 13.0, dl);
      const auto cat = line_catalog(p, dressed_states(p));
      ComplexMatrix sum_l = ComplexMatrix::Zero(4, 4), sum_r = ComplexMatrix::Zero(4, 4);
      for (const auto& a : cat) {
        (a.line.side == Side::L ? sum_l : sum_r) += a.op;
        for (const auto& b : cat) {
          if (a.line.side == b.line.side) CHECK(max_abs(a.op * b.op) < 1e-15);
        }
      }
      const auto cs = collapse_operators(p);
      CHECK(max_abs(sum_l - cs[1].op) < 1e-12);  // XX -> H
      CHECK(max_abs(sum_r - cs[3].op) < 1e-12);  // H -> G
    }
  }

  TEST_CASE("line intensities: dark without drive, L lines sum to the XX->H rate") {
    const auto p0 = at(0.0, 0.0);
    for (const auto& [id, v] : line_intensities(p0, steady_state(liouvillian(p0)))) CHECK(std::abs(v) < 1e-15);

    const auto p = at(2000.0 / 13.0, -20.0);
    const auto rho = steady_state(liouvillian(p));
    const auto in = line_intensities(p, rho);
    double sum_l = 0.0;
    for (const auto& [id, v] : in) {
      CHECK(v >= 0.0);
      if (id.side == Side::L) sum_l += v;
    }
    // Incoherent sum: exact only up to steady-state coherences between dressed states.
    CHECK(sum_l == doctest::Approx(rho(3, 3).real() / (2.0 * p.tau_xx)).epsilon(1e-2));
    // Coherent sum of the L operators is the full XX -> H jump, so this one is exact.
    const auto cat = line_catalog(p, dressed_states(p));
    ComplexMatrix jl = ComplexMatrix::Zero(4, 4);
    for (const auto& j : cat)
      if (j.line.side == Side::L) jl += j.op;
    CHECK(steady_line_intensity(p, jl, rho) == doctest::Approx(rho(3, 3).real() / (2.0 * p.tau_xx)).epsilon(1e-12));
  }

  TEST_CASE("brightest line per side is invariant under common lifetime rescaling") {
    for (double dl : {-63.0, 63.0}) {
      auto brightest = [](const SystemParams& p, Side side) {
        const auto in = line_intensities(p, steady_state(liouvillian(p)));
        LineId best{side, DressedLabel::plus};
        for (const auto& [id, v] : in)
          if (id.side == side && v > in.at(best)) best = id;
        return best;
      };
      const auto p = at(2000.0 / 13.0, dl);
      for (double scale : {0.5, 2.0}) {
        SystemParams q = p;
        q.tau_x *= scale;
        q.tau_xx *= scale;
        CHECK(brightest(q, Side::L) == brightest(p, Side::L));
        CHECK(brightest(q, Side::R) == brightest(p, Side::R));
      }
    }
  }

  TEST_CASE("anticrossing map: minimum L splitting at resonance, growth with drive, bare limit") {
    const auto grid = uniform_grid(-100.0, 5.0, 41);
    double prev_min = 0.0;
    for (double omega : {60.0, 2000.0 / 13.0, 300.0}) {
      const auto rows = anticrossing_map(at(omega, 0.0), grid, 2);
      REQUIRE(rows.size() == 6 * grid.size());
      double best = INFINITY;
      double best_dl = NAN;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double split = std::abs(rows[6 * i + 0].energy - rows[6 * i + 1].energy);
        if (split < best) {
          best = split;
          best_dl = grid[i];
        }
      }
      CHECK(best_dl == 0.0);
      const auto d = dressed_states(at(omega, 0.0));
      CHECK(best == doctest::Approx(std::abs(d[DressedLabel::plus].energy - d[DressedLabel::zero].energy)));
      CHECK(best > prev_min);
      prev_min = best;
    }

    const double omega = 40.0;
    for (double dl : {-400.0, 400.0}) {
      const auto p = at(omega, dl);
      const auto d = dressed_states(p);
      const std::array<double, 3> bare{0.0, p.detuning_v(), p.detuning_xx()};
      for (auto l : kLabels) {
        double nearest = INFINITY;
        for (double b : bare) nearest = std::min(nearest, std::abs(d[l].energy - b));
        CHECK(nearest <= omega * omega / std::abs(dl));
      }
    }

    CHECK_THROWS_AS(anticrossing_map(SystemParams{}, {}, 1), InvalidInputError);
  }

  TEST_CASE("sweeps are independent of the worker count") {
    const auto grid = uniform_grid(-60.0, 3.0, 41);
    const auto a = anticrossing_map(SystemParams{}, grid, 1);
    const auto b = anticrossing_map(SystemParams{}, grid, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].energy == b[i].energy);
      CHECK(a[i].intensity == b[i].intensity);
      CHECK(a[i].line == b[i].line);
    }
    const auto og = uniform_grid(0.0, 10.0, 21);
    const auto pm = power_map(SystemParams{}, og, 3);
    CHECK(pm.size() == 6 * og.size());
    CHECK(pm[0].intensity == doctest::Approx(0.0));
  }
}
