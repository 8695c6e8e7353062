#include "cascade/qsystem.hpp"

#include <cmath>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"

namespace cascade {

namespace {

void require(bool ok, const char* field, const char* rule, double value) {
  if (!ok) {
    throw InvalidInputError(std::string("SystemParams.") + field + " must be " + rule + " (got " +
                            std::to_string(value) + ")");
  }
}

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(delta_Eb) && delta_Eb > 0.0, "delta_Eb", "> 0", delta_Eb);
  require(std::isfinite(delta_fss), "delta_fss", "finite", delta_fss);
  require(std::isfinite(hbar_omega) && hbar_omega >= 0.0, "hbar_omega", ">= 0", hbar_omega);
  require(std::isfinite(delta_laser), "delta_laser", "finite", delta_laser);
  require(std::isfinite(tau_xx) && tau_xx > 0.0, "tau_xx", "> 0", tau_xx);
  require(std::isfinite(tau_x) && tau_x > 0.0, "tau_x", "> 0", tau_x);
  require(std::isfinite(gamma_deph) && gamma_deph >= 0.0, "gamma_deph", ">= 0", gamma_deph);
  require(std::isfinite(e_x), "e_x", "finite", e_x);
}

SystemParams reference_params(double delta_Eb) {
  SystemParams p;
  p.delta_Eb = delta_Eb;
  p.hbar_omega = delta_Eb / 13.0;
  return p;
}

ComplexMatrix ket_bra(BareState i, BareState j) {
  ComplexMatrix m = ComplexMatrix::Zero(kHilbertDim, kHilbertDim);
  m(index_of(i), index_of(j)) = 1.0;
  return m;
}

ComplexMatrix hamiltonian_rf(const SystemParams& p) {
  p.validate();
  using enum BareState;
  ComplexMatrix h = ComplexMatrix::Zero(kHilbertDim, kHilbertDim);
  h(index_of(V), index_of(V)) = p.detuning_v();
  h(index_of(H), index_of(H)) = p.detuning_h();
  h(index_of(XX), index_of(XX)) = p.detuning_xx();
  const double c = 0.5 * p.hbar_omega;
  h(index_of(G), index_of(V)) = h(index_of(V), index_of(G)) = c;
  h(index_of(V), index_of(XX)) = h(index_of(XX), index_of(V)) = c;
  return h;
}

std::vector<CollapseChannel> collapse_operators(const SystemParams& p) {
  p.validate();
  using enum BareState;
  std::vector<CollapseChannel> out;
  const double xx_rate = 1.0 / (2.0 * p.tau_xx);
  const double x_rate = 1.0 / p.tau_x;
  out.push_back({"XX->V", xx_rate, std::sqrt(xx_rate) * ket_bra(V, XX)});
  out.push_back({"XX->H", xx_rate, std::sqrt(xx_rate) * ket_bra(H, XX)});
  out.push_back({"V->G", x_rate, std::sqrt(x_rate) * ket_bra(G, V)});
  out.push_back({"H->G", x_rate, std::sqrt(x_rate) * ket_bra(G, H)});
  if (p.gamma_deph > 0.0) {
    const double amp = std::sqrt(p.gamma_deph);
    out.push_back({"dephasing V", p.gamma_deph, amp * ket_bra(V, V)});
    out.push_back({"dephasing H", p.gamma_deph, amp * ket_bra(H, H)});
    out.push_back({"dephasing XX", p.gamma_deph, amp * ket_bra(XX, XX)});
  }
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw InvalidInputError("unvectorize: vector length " + std::to_string(v.size()) +
                            " does not match dimension " + std::to_string(dim));
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

Superoperator liouvillian(const ComplexMatrix& h, std::span<const CollapseChannel> collapses) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw InvalidInputError("liouvillian: Hamiltonian must be square and non-empty");
  }
  if (!is_hermitian(h)) {
    throw InvalidInputError("liouvillian: Hamiltonian is not Hermitian");
  }
  const auto n = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const Complex minus_i_over_hbar(0.0, -1.0 / kHbar);

  ComplexMatrix l = minus_i_over_hbar *
                    (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : collapses) {
    if (c.op.rows() != n || c.op.cols() != n) {
      throw InvalidInputError("liouvillian: collapse operator '" + c.name + "' has shape " +
                              std::to_string(c.op.rows()) + "x" + std::to_string(c.op.cols()));
    }
    const ComplexMatrix cdc = c.op.adjoint() * c.op;
    l += kron(c.op.conjugate(), c.op);
    l -= 0.5 * kron(id, cdc);
    l -= 0.5 * kron(cdc.transpose(), id);
  }
  return {std::move(l), static_cast<int>(n)};
}

Superoperator liouvillian(const SystemParams& p) {
  const auto collapses = collapse_operators(p);
  return liouvillian(hamiltonian_rf(p), collapses);
}

}  // namespace cascade
