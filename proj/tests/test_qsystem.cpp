#include <cmath>

#include "cascade/dynamics.hpp"
#include "cascade/errors.hpp"
#include "cascade/qsystem.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cascade;
using test_support::max_abs;

TEST_SUITE("qsystem") {
  TEST_CASE("SystemParams: defaults and validation") {
    const SystemParams p = reference_params();
    CHECK(p.tau_xx == 314.0);
    CHECK(p.tau_x == 742.0);
    CHECK(p.hbar_omega == doctest::Approx(2000.0 / 13.0));
    CHECK(p.gamma_deph == 0.0);
    CHECK(p.laser_energy() == doctest::Approx(p.e_x - 1000.0));
    CHECK(p.biexciton_energy() == doctest::Approx(2.0 * p.laser_energy()));  // two-photon resonance

    auto bad = [](auto mutate) {
      SystemParams q;
      mutate(q);
      return q;
    };
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.delta_Eb = 0.0; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.tau_xx = -1.0; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.tau_x = 0.0; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.hbar_omega = -1.0; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.gamma_deph = -1e-3; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(bad([](SystemParams& q) { q.delta_laser = NAN; }).validate(), InvalidInputError);
    CHECK_THROWS_AS(hamiltonian_rf(bad([](SystemParams& q) { q.delta_Eb = -5.0; })), InvalidInputError);
  }

  TEST_CASE("hamiltonian_rf: undriven resonant case is diagonal") {
    SystemParams p;
    p.hbar_omega = 0.0;
    const auto h = hamiltonian_rf(p);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.diagonal() << 0.0, 1000.0, 1050.0, 0.0;
    CHECK(max_abs(h - expected) == 0.0);
  }

  TEST_CASE("hamiltonian_rf: structure and Hermiticity across parameters") {
    for (double omega : {0.0, 10.0, 153.8, 900.0}) {
      for (double dl : {-300.0, -63.0, 0.0, 17.5}) {
        SystemParams p;
        p.hbar_omega = omega;
        p.delta_laser = dl;
        const auto h = hamiltonian_rf(p);
        CHECK(max_abs(h - h.adjoint()) == 0.0);
        CHECK(h(1, 1).real() == doctest::Approx(1000.0 - dl));
        CHECK(h(2, 2).real() == doctest::Approx(1050.0 - dl));
        CHECK(h(3, 3).real() == doctest::Approx(-2.0 * dl));
        CHECK(h(0, 1).real() == doctest::Approx(omega / 2.0));
        CHECK(h(1, 3).real() == doctest::Approx(omega / 2.0));
        CHECK(h(0, 3) == Complex(0.0));
        CHECK(h.row(2).cwiseAbs().sum() == doctest::Approx(std::abs(1050.0 - dl)));  // H uncoupled
      }
    }
  }

  TEST_CASE("hamiltonian_rf: two-photon resonance has the antisymmetric G/XX zero mode") {
    const auto h = hamiltonian_rf(SystemParams{});
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = -1.0 / std::sqrt(2.0);
    v(3) = 1.0 / std::sqrt(2.0);
    CHECK((h * v).norm() < 1e-12);
  }

  TEST_CASE("hamiltonian_rf: splitting of the G/XX doublet follows (hbar Omega)^2 / dEb") {
    // Second-order degenerate perturbation theory through V: the symmetric
    // combination shifts by -2 (hbar Omega / 2)^2 / (dEb / 2) = -(hbar Omega)^2 / dEb.
    SystemParams p;
    p.hbar_omega = p.delta_Eb / 100.0;
    ComplexMatrix block(3, 3);
    const auto h = hamiltonian_rf(p);
    const int idx[3] = {0, 1, 3};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) block(i, j) = h(idx[i], idx[j]);
    const auto e = hermitian_eigen(block);
    const double splitting = std::abs(e.eigenvalues(1) - e.eigenvalues(0));
    const double predicted = p.hbar_omega * p.hbar_omega / p.delta_Eb;
    CHECK(splitting / predicted == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("collapse_operators: radiative channels and optional dephasing") {
    SystemParams p;
    auto c = collapse_operators(p);
    REQUIRE(c.size() == 4);
    CHECK(c[0].rate == doctest::Approx(1.0 / 628.0));
    CHECK(c[1].rate == doctest::Approx(1.0 / 628.0));
    CHECK(c[2].rate == doctest::Approx(1.0 / 742.0));
    CHECK(c[0].op(index_of(BareState::V), index_of(BareState::XX)).real() == doctest::Approx(std::sqrt(1.0 / 628.0)));
    CHECK(c[3].op(index_of(BareState::G), index_of(BareState::H)).real() == doctest::Approx(std::sqrt(1.0 / 742.0)));
    p.gamma_deph = 0.01;
    c = collapse_operators(p);
    REQUIRE(c.size() == 7);
    CHECK(c[4].op(1, 1).real() == doctest::Approx(0.1));
  }

  TEST_CASE("vectorization is column stacking and round-trips") {
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const auto v = vectorize(m);
    CHECK(v(1) == Complex(3.0));
    CHECK(max_abs(unvectorize(v, 2) - m) == 0.0);
    CHECK_THROWS_AS(unvectorize(v, 3), InvalidInputError);
  }

  TEST_CASE("liouvillian: zero generator, shape errors, non-Hermitian H") {
    const auto l = liouvillian(ComplexMatrix::Zero(4, 4), {});
    CHECK(max_abs(l.matrix) == 0.0);
    CHECK(l.hilbert_dim == 4);

    std::vector<CollapseChannel> bad{{"bad", 1.0, ComplexMatrix::Zero(3, 3)}};
    CHECK_THROWS_AS(liouvillian(ComplexMatrix::Zero(4, 4), bad), InvalidInputError);
    ComplexMatrix nh = ComplexMatrix::Zero(4, 4);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(liouvillian(nh, {}), InvalidInputError);
  }

  TEST_CASE("liouvillian: matches the direct Lindblad formula") {
    std::mt19937_64 rng(11);
    SystemParams p;
    p.gamma_deph = 0.002;
    p.delta_laser = 31.0;
    const auto h = hamiltonian_rf(p);
    const auto cs = collapse_operators(p);
    const auto l = liouvillian(h, cs);
    const Complex i(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
      const auto rho = test_support::random_density(rng, 4);
      ComplexMatrix direct = -i / 658.2119569 * (h * rho - rho * h);
      for (const auto& c : cs) {
        const ComplexMatrix cdc = c.op.adjoint() * c.op;
        direct += c.op * rho * c.op.adjoint() - 0.5 * (cdc * rho + rho * cdc);
      }
      CHECK(max_abs(unvectorize(l.apply(vectorize(rho)), 4) - direct) < 1e-15);
    }
  }

  TEST_CASE("liouvillian: trace preservation for 100 random states") {
    std::mt19937_64 rng(5);
    const auto l = liouvillian(SystemParams{});
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto rho = test_support::random_density(rng, 4);
      worst = std::max(worst, std::abs(unvectorize(l.apply(vectorize(rho)), 4).trace()));
    }
    CHECK(worst < 1e-12);
    // Left null vector vec(I)^T.
    const ComplexVector id = vectorize(ComplexMatrix::Identity(4, 4));
    CHECK(max_abs(id.transpose() * l.matrix) < 1e-15);
  }

  TEST_CASE("liouvillian: spectral abscissa <= 0 with a single zero eigenvalue") {
    const auto l = liouvillian(SystemParams{});
    Eigen::ComplexEigenSolver<ComplexMatrix> es(l.matrix);
    int zeros = 0;
    double abscissa = -INFINITY;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex ev = es.eigenvalues()(i);
      if (std::abs(ev) < 1e-10) ++zeros;
      else abscissa = std::max(abscissa, ev.real());
    }
    CHECK(zeros == 1);
    CHECK(abscissa < 0.0);
  }

  TEST_CASE("undriven steady state is the ground state") {
    SystemParams p;
    p.hbar_omega = 0.0;
    const auto rho = steady_state(liouvillian(p));
    CHECK(std::abs(rho(0, 0) - 1.0) < 1e-10);
    CHECK(max_abs(rho - ket_bra(BareState::G, BareState::G)) < 1e-10);
  }

  TEST_CASE("biexciton population decays at 1/tau_xx without drive") {
    SystemParams p;
    p.hbar_omega = 0.0;
    const auto l = liouvillian(p);
    const auto grid = uniform_grid(0.0, 50.0, 21);
    const auto traj = evolve(l, ket_bra(BareState::XX, BareState::XX), grid);
    // Least-squares slope of log population.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double y = std::log(traj[i](3, 3).real());
      sx += grid[i];
      sy += y;
      sxx += grid[i] * grid[i];
      sxy += grid[i] * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(-slope == doctest::Approx(1.0 / 314.0).epsilon(1e-6));
  }
}
