#include "cascade/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

double norm_one(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double norm_inf(const ComplexMatrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

ComplexMatrix matrix_power(ComplexMatrix base, long exponent) {
  ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

// One classical RK4 step of size h for dy/dt = G y. For a linear right-hand
// side the four stages collapse to the degree-4 Taylor polynomial in hG.
ComplexMatrix rk4_step_matrix(const ComplexMatrix& generator, double h) {
  const ComplexMatrix a = h * generator;
  const auto n = generator.rows();
  ComplexMatrix step = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 4; ++k) {
    term = term * a / static_cast<double>(k);
    step += term;
  }
  return step;
}

struct IntervalPropagator {
  long substeps = 0;
  ComplexMatrix matrix;
};

IntervalPropagator interval_propagator(const ComplexMatrix& generator, double dt,
                                       long initial_substeps, const OdeOptions& options) {
  long n = std::max(1L, initial_substeps);
  ComplexMatrix coarse = matrix_power(rk4_step_matrix(generator, dt / static_cast<double>(n)), n);
  while (true) {
    if (2 * n > options.max_substeps) {
      throw NumericalError("propagate_ode: substep refinement did not converge within " +
                           std::to_string(options.max_substeps) + " substeps");
    }
    ComplexMatrix fine =
        matrix_power(rk4_step_matrix(generator, dt / static_cast<double>(2 * n)), 2 * n);
    // ||(fine - coarse) y||_inf <= ||fine - coarse||_inf * ||y||_inf for every y.
    if (norm_inf(fine - coarse) < options.tolerance) {
      return {2 * n, std::move(fine)};
    }
    n *= 2;
    coarse = std::move(fine);
  }
}

}  // namespace

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.norm();
  return (m - m.adjoint()).norm() <= rel_tol * std::max(scale, 1e-300);
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidInputError("hermitian_eigen: matrix must be square and non-empty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!is_hermitian(m)) {
    throw InvalidInputError("hermitian_eigen: matrix is not Hermitian");
  }
  // Symmetrize away the sub-tolerance skew part before handing off.
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigen: eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw InvalidInputError("solve_linear: matrix must be square and non-empty");
  }
  if (b.size() != a.rows()) {
    throw InvalidInputError("solve_linear: right-hand side has length " + std::to_string(b.size()) +
                            ", expected " + std::to_string(a.rows()));
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-12)) {
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    throw SingularMatrixError("solve_linear: matrix is singular or ill-conditioned (condition estimate " +
                                  std::to_string(cond) + ")",
                              cond);
  }
  ComplexVector x = lu.solve(b);
  // One step of iterative refinement keeps the residual at roundoff level.
  const ComplexVector r = b - a * x;
  x += lu.solve(r);
  return x;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError("matrix_exponential: matrix must be square");
  }
  const auto n = m.rows();
  if (n == 0) return m;
  const double norm = norm_one(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix a = m / std::ldexp(1.0, squarings);

  ComplexMatrix result = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
    if (norm_one(term) <= 1e-18 * norm_one(result)) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

std::vector<ComplexVector> propagate_ode(const ComplexMatrix& generator, const ComplexVector& y0,
                                         std::span<const double> t_grid,
                                         const OdeOptions& options) {
  if (generator.rows() != generator.cols() || generator.rows() != y0.size()) {
    throw InvalidInputError("propagate_ode: generator and state dimensions do not match");
  }
  if (!(options.tolerance > 0.0) || options.max_substeps < 2) {
    throw InvalidInputError("propagate_ode: step control parameters must be positive");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw InvalidInputError("propagate_ode: time grid must be strictly ascending (index " +
                              std::to_string(i) + ")");
    }
  }

  std::vector<ComplexVector> out;
  out.reserve(t_grid.size());
  if (t_grid.empty()) return out;
  out.push_back(y0);

  const double gnorm = norm_inf(generator);
  // Uniform grids reuse the same interval propagator; key on the exact step.
  std::map<double, IntervalPropagator> cache;
  long last_substeps = 1;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    auto it = cache.find(dt);
    if (it == cache.end()) {
      const long guess = std::max(
          last_substeps / 2, static_cast<long>(std::ceil(dt * gnorm / 0.5)));
      it = cache.emplace(dt, interval_propagator(generator, dt, guess, options)).first;
      last_substeps = it->second.substeps;
    }
    out.push_back(it->second.matrix * out.back());
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<double> uniform_grid(double start, double step, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + step * static_cast<double>(i);
  return grid;
}

}  // namespace cascade
