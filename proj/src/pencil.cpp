#include "kornlab/pencil.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kornlab/errors.hpp"

namespace kornlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

class MInner {
 public:
  explicit MInner(const Eigen::SparseMatrix<double>& m) : m_(m) {}
  double dot(const VectorXd& a, const VectorXd& b) const { return a.dot(m_ * b); }
  // Two passes of classical Gram–Schmidt against the columns of V.
  void orthogonalize(VectorXd& w, const MatrixXd& v) const {
    if (v.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      const VectorXd mw = m_ * w;
      w -= v * (v.transpose() * mw);
    }
  }

 private:
  const Eigen::SparseMatrix<double>& m_;
};

VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

PencilResult largest_eigenpairs(const LinearOperator& k, const Eigen::SparseMatrix<double>& m,
                                const PencilOptions& options) {
  const Eigen::Index n = m.rows();
  if (n == 0) throw SolverError("empty eigenproblem (no free degrees of freedom)");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(m);
  if (factor.info() != Eigen::Success) throw SolverError("mass-side matrix could not be factored");
  const VectorXd d = factor.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (d.minCoeff() <= 1e-12 * dmax)
    throw SolverError("mass-side matrix is singular or indefinite on the constrained space (undetected rigid mode?)");

  const MInner inner(m);
  std::mt19937_64 rng(options.seed);
  const int nev = static_cast<int>(std::min<Eigen::Index>(options.eigenpairs, n));
  const int maxdim = static_cast<int>(std::min<Eigen::Index>(std::max(options.subspace, 2 * nev + 2), n));
  const int keep = std::max(nev + 1, maxdim / 2);

  MatrixXd v(n, 0), kv(n, 0), h(0, 0);
  VectorXd next = options.start ? *options.start : random_vector(n, rng);
  if (next.size() != n) throw SolverError("start vector has wrong dimension");
  {
    double nn = std::sqrt(std::max(0.0, inner.dot(next, next)));
    if (!(nn > 0)) {
      next = random_vector(n, rng);
      nn = std::sqrt(inner.dot(next, next));
    }
    next /= nn;
  }

  PencilResult result;
  double best_residual = std::numeric_limits<double>::infinity();
  int since_progress = 0;
  VectorXd previous_values;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    result.restarts = restart;
    while (v.cols() < maxdim) {
      const Eigen::Index j = v.cols();
      v.conservativeResize(n, j + 1);
      kv.conservativeResize(n, j + 1);
      v.col(j) = next;
      kv.col(j) = k(next);
      const VectorXd hcol = v.transpose() * kv.col(j);
      h.conservativeResize(j + 1, j + 1);
      h.col(j) = hcol;
      h.row(j) = hcol.transpose();
      if (v.cols() == n) break;

      VectorXd w = factor.solve(kv.col(j));
      const double scale = std::sqrt(std::max(0.0, inner.dot(w, w)));
      inner.orthogonalize(w, v);
      double beta = std::sqrt(std::max(0.0, inner.dot(w, w)));
      if (!(beta > 1e-12 * std::max(scale, 1e-300))) {
        // Invariant subspace reached: continue from a fresh direction.
        w = random_vector(n, rng);
        inner.orthogonalize(w, v);
        beta = std::sqrt(inner.dot(w, w));
      }
      next = w / beta;
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()));
    if (es.info() != Eigen::Success) throw SolverError("projected eigenproblem failed");
    const Eigen::Index dim = h.rows();
    const int kept = static_cast<int>(std::min<Eigen::Index>(keep, dim));
    MatrixXd s(dim, kept);
    VectorXd theta(kept);
    for (int i = 0; i < kept; ++i) {
      s.col(i) = es.eigenvectors().col(dim - 1 - i);
      theta[i] = es.eigenvalues()[dim - 1 - i];
    }
    MatrixXd y = v * s;
    MatrixXd ky = kv * s;

    double worst = 0;
    for (int i = 0; i < nev; ++i) {
      const VectorXd my = m * y.col(i);
      const double denom = ky.col(i).norm() + std::abs(theta[i]) * my.norm();
      const double res = (ky.col(i) - theta[i] * my).norm();
      worst = std::max(worst, denom > 0 ? res / denom : res);
    }
    result.residual = worst;
    const bool exhausted = dim == n;
    if (worst < 0.5 * best_residual) {
      best_residual = worst;
      since_progress = 0;
    } else {
      ++since_progress;
    }
    const VectorXd values = theta.head(nev);
    const bool values_fixed =
        previous_values.size() == nev &&
        (values - previous_values).cwiseAbs().maxCoeff() <= options.tolerance * values.cwiseAbs().maxCoeff();
    previous_values = values;
    result.stagnated = worst > options.tolerance && since_progress >= options.stall_restarts && values_fixed;
    if (worst <= options.tolerance || exhausted || result.stagnated || restart == options.max_restarts) {
      result.converged = worst <= options.tolerance || exhausted || result.stagnated;
      for (int i = 0; i < nev; ++i) {
        result.values.push_back(theta[i]);
        result.vectors.push_back(y.col(i));
      }
      return result;
    }
    v = std::move(y);
    kv = std::move(ky);
    h = theta.asDiagonal();
    // `next` is M-orthogonal to the old basis, hence to the kept Ritz vectors.
  }
  return result;
}

PencilResult dense_eigenpairs(const MatrixXd& k, const MatrixXd& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(k, m);
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  PencilResult r;
  const Eigen::Index n = k.rows();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    r.values.push_back(es.eigenvalues()[i]);
    r.vectors.push_back(es.eigenvectors().col(i));
  }
  r.converged = true;
  return r;
}

}  // namespace kornlab
