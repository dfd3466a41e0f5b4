#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "kornlab/errors.hpp"
#include "kornlab/pencil.hpp"

using namespace kornlab;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double shift) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = z(rng);
  return x * x.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("Krylov iteration matches the dense pencil") {
  std::mt19937_64 rng(9);
  for (int n : {5, 40, 200}) {
    const Eigen::MatrixXd k = random_spd(n, rng, 0.0) - 0.5 * n * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd m = random_spd(n, rng, 1.0);
    const Eigen::SparseMatrix<double> ms = m.sparseView();
    PencilOptions o;
    o.eigenpairs = std::min(4, n);
    const PencilResult it = largest_eigenpairs([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(k * x); }, ms, o);
    const PencilResult dense = dense_eigenpairs(k, m);
    REQUIRE(it.converged);
    REQUIRE(it.values.size() >= static_cast<std::size_t>(o.eigenpairs));
    for (int i = 0; i < o.eigenpairs; ++i) {
      CHECK(it.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-9));
      const Eigen::VectorXd r = k * it.vectors[i] - it.values[i] * (m * it.vectors[i]);
      CHECK(r.norm() <= 1e-7 * (k.norm() + std::abs(it.values[i]) * m.norm()));
      CHECK(it.vectors[i].dot(m * it.vectors[i]) == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (std::size_t i = 1; i < it.values.size(); ++i) CHECK(it.values[i] <= it.values[i - 1]);
  }
}

TEST_CASE("degenerate top eigenvalue") {
  // diag(3, 3, 3, 1, ...) against the identity: a triple top eigenvalue.
  const int n = 30;
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0);
  d.head(3).setConstant(3.0);
  Eigen::SparseMatrix<double> id(n, n);
  id.setIdentity();
  PencilOptions o;
  o.eigenpairs = 4;
  const PencilResult r =
      largest_eigenpairs([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(d.cwiseProduct(x)); }, id, o);
  CHECK(r.values[0] == doctest::Approx(3.0));
  CHECK(r.values[2] == doctest::Approx(3.0));
  CHECK(r.values[3] == doctest::Approx(1.0));
}

TEST_CASE("singular mass matrix is rejected") {
  Eigen::SparseMatrix<double> m(3, 3);
  m.insert(0, 0) = 1.0;
  m.insert(1, 1) = 1.0;
  CHECK_THROWS_AS(largest_eigenpairs([](const Eigen::VectorXd& x) { return x; }, m), SolverError);
}

TEST_CASE("fixed seed is reproducible") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd k = random_spd(60, rng, 0.0);
  const Eigen::SparseMatrix<double> m = random_spd(60, rng, 2.0).sparseView();
  auto op = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(k * x); };
  const PencilResult a = largest_eigenpairs(op, m);
  const PencilResult b = largest_eigenpairs(op, m);
  CHECK(a.values == b.values);
}

TEST_CASE("round-off floor on an ill-conditioned mass matrix") {
  // M = Q diag(d) Qᵀ with d spanning 1e-9 … 1 and K = Q diag(d λ) Qᵀ: the
  // eigenvalues are exactly λ, while the residual stalls near machine
  // precision times the condition number of M.
  std::mt19937_64 rng(12);
  const int n = 80;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_spd(n, rng, 0.0));
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n), lambda(n);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  for (int i = 0; i < n; ++i) {
    d[i] = std::pow(10.0, -9.0 * i / (n - 1));
    lambda[i] = u(rng);
  }
  lambda[n / 2] = 3.0;
  const Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
  const Eigen::MatrixXd k = q * d.cwiseProduct(lambda).asDiagonal() * q.transpose();
  PencilOptions o;
  o.eigenpairs = 1;
  o.subspace = 20;
  o.tolerance = 1e-15;
  const PencilResult it =
      largest_eigenpairs([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(k * x); }, m.sparseView(), o);
  CHECK(it.converged);
  CHECK(it.stagnated);
  CHECK(it.restarts < o.max_restarts);
  CHECK(it.values[0] == doctest::Approx(3.0).epsilon(1e-9));
}
