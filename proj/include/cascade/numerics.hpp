#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cascade {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Eigenvalues ascending; column i of `eigenvectors` belongs to eigenvalue i.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  ComplexMatrix eigenvectors;
};

/// ||M - M^dagger|| <= rel_tol * ||M|| (Frobenius). Non-square matrices are never Hermitian.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);

/// Throws InvalidInputError for non-square or non-Hermitian input.
EigenDecomposition hermitian_eigen(const ComplexMatrix& m);

/// Solves A x = b. Throws SingularMatrixError when the reciprocal condition
/// estimate drops below 1e-12.
ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b);

/// exp(M) by scaling and squaring of a Taylor series.
ComplexMatrix matrix_exponential(const ComplexMatrix& m);

struct OdeOptions {
  /// Substep tolerance: doubling the substep count must move each grid value by
  /// less than `tolerance * max|y(t_start)|`.
  double tolerance = 1e-8;
  /// Upper bound on substeps per grid interval before giving up.
  long max_substeps = 1L << 24;
};

/// Integrates dy/dt = G y with classical RK4 and returns y at every grid time
/// (the first entry is y0 at t_grid[0]). Each grid interval is split into
/// substeps; the count is doubled until a Richardson check passes.
std::vector<ComplexVector> propagate_ode(const ComplexMatrix& generator,
                                         const ComplexVector& y0,
                                         std::span<const double> t_grid,
                                         const OdeOptions& options = {});

/// Kronecker product.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Uniform grid start, start+step, ..., with `count` points.
std::vector<double> uniform_grid(double start, double step, std::size_t count);

}  // namespace cascade
