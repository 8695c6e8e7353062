#pragma once

#include <span>
#include <string>
#include <vector>

#include "cascade/numerics.hpp"

namespace cascade {

/// Bare basis of the quantum dot. V is the laser-driven (vertically polarized)
/// exciton, H the spectator exciton. The index order is part of the file formats.
enum class BareState : int { G = 0, V = 1, H = 2, XX = 3 };

inline constexpr int kHilbertDim = 4;

constexpr int index_of(BareState s) { return static_cast<int>(s); }

/// Physical parameters of the driven four-level system. Energies in ueV,
/// lifetimes in ps, rates in 1/ps.
struct SystemParams {
  double delta_Eb = 2000.0;          ///< biexciton binding energy, E_XX = 2 E_X - delta_Eb
  double delta_fss = 50.0;           ///< fine-structure splitting E_H - E_V
  double hbar_omega = 2000.0 / 13.0; ///< single-photon Rabi coupling
  double delta_laser = 0.0;          ///< laser detuning from the two-photon resonance (> 0: above)
  double tau_xx = 314.0;             ///< biexciton lifetime
  double tau_x = 742.0;              ///< exciton lifetime, both V and H channels
  double gamma_deph = 0.0;           ///< optional pure-dephasing rate
  double e_x = 1.34e6;               ///< absolute exciton energy, only used for lab-frame lines

  /// Throws InvalidInputError naming the offending field.
  void validate() const;

  double laser_energy() const { return e_x - 0.5 * delta_Eb + delta_laser; }
  double biexciton_energy() const { return 2.0 * e_x - delta_Eb; }
  double h_exciton_energy() const { return e_x + delta_fss; }

  /// Rotating-frame diagonal entries.
  double detuning_v() const { return 0.5 * delta_Eb - delta_laser; }
  double detuning_h() const { return detuning_v() + delta_fss; }
  double detuning_xx() const { return -2.0 * delta_laser; }
};

/// Reference parameter set: lifetimes 314/742 ps and hbar_omega = delta_Eb / 13.
SystemParams reference_params(double delta_Eb = 2000.0);

/// 4x4 Hamiltonian in the frame rotating at the laser energy per absorbed photon (ueV).
ComplexMatrix hamiltonian_rf(const SystemParams& p);

/// A Lindblad channel. `op` already contains the sqrt(rate) prefactor.
struct CollapseChannel {
  std::string name;
  double rate = 0.0;
  ComplexMatrix op;
};

/// Radiative channels XX->V, XX->H (each 1/(2 tau_xx)), V->G, H->G (1/tau_x),
/// plus pure dephasing of V, H and XX when gamma_deph > 0.
std::vector<CollapseChannel> collapse_operators(const SystemParams& p);

/// Linear generator acting on column-stacked density matrices (1/ps).
struct Superoperator {
  ComplexMatrix matrix;
  int hilbert_dim = 0;

  ComplexVector apply(const ComplexVector& vec_rho) const { return matrix * vec_rho; }
};

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, int dim);

/// L vec(rho) = vec(-(i/hbar)[H, rho] + sum_k C rho C^dag - 1/2 {C^dag C, rho}).
Superoperator liouvillian(const ComplexMatrix& h, std::span<const CollapseChannel> collapses);

/// Shorthand for liouvillian(hamiltonian_rf(p), collapse_operators(p)).
Superoperator liouvillian(const SystemParams& p);

/// |i><j| on the bare basis.
ComplexMatrix ket_bra(BareState i, BareState j);

}  // namespace cascade
