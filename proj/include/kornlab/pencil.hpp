#pragma once

// Top eigenpairs of a symmetric-definite pencil K x = λ M x.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

namespace kornlab {

/// Symmetric operator x ↦ Kx.
using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PencilOptions {
  int eigenpairs = 4;
  int subspace = 60;       ///< maximal search-space size before a restart
  double tolerance = 1e-10;  ///< relative residual ‖Kx − λMx‖ / (‖Kx‖ + |λ|‖Mx‖)
  int max_restarts = 400;
  int stall_restarts = 8;  ///< restarts without residual progress before stagnation is declared
  std::optional<Eigen::VectorXd> start;
  unsigned long long seed = 0x5eedULL;
};

struct PencilResult {
  std::vector<double> values;      ///< descending
  std::vector<Eigen::VectorXd> vectors;  ///< M-orthonormal
  double residual = 0;             ///< worst relative residual of the returned pairs
  int restarts = 0;
  bool converged = false;
  /// The residual stalled above tolerance at a round-off floor (ill-conditioned M)
  /// while the Ritz values stayed fixed to tolerance; counted as converged.
  bool stagnated = false;
};

/// Thick-restarted Krylov–Rayleigh–Ritz iteration on M⁻¹K in the M inner
/// product; M must be symmetric positive definite (factored once by sparse
/// LDLᵀ). Throws SolverError when M is singular.
PencilResult largest_eigenpairs(const LinearOperator& k, const Eigen::SparseMatrix<double>& m,
                                const PencilOptions& options = {});

/// Dense reference solver: all eigenvalues of K x = λ M x, descending.
PencilResult dense_eigenpairs(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m);

}  // namespace kornlab
