#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "kornlab/errors.hpp"
#include "kornlab/kornfem.hpp"
#include "kornlab/pencil.hpp"

using namespace kornlab;

namespace {

double max_abs(const SparseMatrix& m) {
  double r = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

double null_lagrangian_defect(const TriMesh& mesh, BoundaryCondition bc) {
  const auto forms = assemble(mesh);
  const auto c = constraints_for(mesh, bc);
  const SparseMatrix d = 2 * forms.sym_sym - forms.grad_grad - forms.div_div;
  return max_abs(restrict_form(d, c)) / max_abs(restrict_form(forms.grad_grad, c));
}

Vector divfree_seed(const TriMesh& mesh, Point center, double radius) {
  return interpolate(mesh, [&](const Point& x) { return divfree_bump(x, center, radius); });
}

}  // namespace

TEST_CASE("element matrices of a single triangle") {
  const TriMesh mesh = TriMesh::build({{0, 0}, {2, 0}, {0.5, 1}}, {{0, 1, 2}});
  const auto forms = assemble(mesh);
  const double area = 1.0;
  // Barycentric gradients of the three vertices.
  const Eigen::Matrix<double, 3, 2> g = (Eigen::Matrix<double, 3, 2>() << -0.5, -0.75, 0.5, -0.25, 0, 1).finished();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6), b = a, c = a;
  Eigen::VectorXd q(6);
  for (int p = 0; p < 3; ++p) {
    q(2 * p) = -area * g(p, 1);
    q(2 * p + 1) = area * g(p, 0);
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double gg = g.row(p).dot(g.row(r));
          a(2 * p + i, 2 * r + j) = area * (i == j ? gg : 0);
          b(2 * p + i, 2 * r + j) = area * 0.5 * ((i == j ? gg : 0) + g(p, j) * g(r, i));
          c(2 * p + i, 2 * r + j) = area * g(p, i) * g(r, j);
        }
  }
  CHECK((Eigen::MatrixXd(forms.grad_grad) - a).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Eigen::MatrixXd(forms.sym_sym) - b).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Eigen::MatrixXd(forms.div_div) - c).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((forms.curl_functional - q).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("quadratic forms on an affine field") {
  // u(x) = M x: every form is |Ω| times its pointwise value.
  const TriMesh mesh = disk(1);
  const Mat2 m{0.3, -1.1, 0.7, 0.2};
  const Vector u = interpolate(mesh, [&](const Point& x) {
    return Point(m.m11 * x.x() + m.m12 * x.y(), m.m21 * x.x() + m.m22 * x.y());
  });
  const auto forms = assemble(mesh);
  const double area = mesh.area();
  const Mat2 sym = 0.5 * (m + m.transpose());
  CHECK(u.dot(forms.grad_grad * u) == doctest::Approx(area * norm_sq(m)).epsilon(1e-13));
  CHECK(u.dot(forms.sym_sym * u) == doctest::Approx(area * norm_sq(sym)).epsilon(1e-13));
  CHECK(u.dot(forms.div_div * u) == doctest::Approx(area * m.trace() * m.trace()).epsilon(1e-13));
  CHECK(forms.curl_functional.dot(u) == doctest::Approx(area * (m.m21 - m.m12)).epsilon(1e-13));
}

TEST_CASE("2B - A - C vanishes on interior dofs") {
  for (const TriMesh& mesh : {unit_square(1), unit_square(4), disk(2), annulus(1), disk(1, Point(3, -1), 0.5)})
    CHECK(null_lagrangian_defect(mesh, BoundaryCondition::Dirichlet) <= 1e-13);
  // The full space carries the boundary term.
  const auto forms = assemble(unit_square(2));
  CHECK(max_abs(2 * forms.sym_sym - forms.grad_grad - forms.div_div) > 1e-3);
}

TEST_CASE("tangential constraints") {
  const TriMesh sq = unit_square(2);
  const ConstraintSet c = constraints_for(sq, BoundaryCondition::Tangential);
  int pinned = 0, normal = 0;
  for (std::size_t v = 0; v < sq.vertex_count(); ++v) {
    const Point& x = sq.vertices()[v];
    const auto& vc = c.vertices[v];
    if (vc.kind == VertexConstraint::Kind::Pinned) ++pinned;
    if (vc.kind == VertexConstraint::Kind::NormalConstrained) {
      ++normal;
      const Point expect = x.x() == 0 ? Point(-1, 0) : x.x() == 1 ? Point(1, 0) : x.y() == 0 ? Point(0, -1) : Point(0, 1);
      CHECK((vc.normal - expect).norm() < 1e-14);
    }
  }
  CHECK(pinned == 4);
  CHECK(normal == 12);
  CHECK(c.reduced_dofs() == 2 * 9 + 12);
  // Columns of P are orthonormal.
  const Eigen::MatrixXd ptp = Eigen::MatrixXd(SparseMatrix(c.prolongation.transpose() * c.prolongation));
  CHECK((ptp - Eigen::MatrixXd::Identity(ptp.rows(), ptp.cols())).cwiseAbs().maxCoeff() < 1e-14);

  // On the disk the bisector normal is radial.
  for (int level = 1; level <= 3; ++level) {
    const TriMesh d = disk(level);
    const ConstraintSet cd = constraints_for(d, BoundaryCondition::Tangential);
    double worst = 0;
    for (std::size_t v = 0; v < d.vertex_count(); ++v)
      if (cd.vertices[v].kind == VertexConstraint::Kind::NormalConstrained)
        worst = std::max(worst, (cd.vertices[v].normal - d.vertices()[v].normalized()).norm());
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("rotational symmetry detection") {
  const LOmegaInfo centered = detect_L_omega(disk(2, Point(3, -1), 1.5));
  CHECK(centered.kind == LOmegaInfo::Kind::Rotational);
  CHECK((centered.center - Point(3, -1)).norm() <= 1e-3);
  CHECK(detect_L_omega(annulus(0)).kind == LOmegaInfo::Kind::Rotational);
  CHECK(detect_L_omega(unit_square(3)).kind == LOmegaInfo::Kind::Trivial);
  // An ellipse-like band has no rotation field.
  const TriMesh band = radial_band(
      96, 2, [](double t) { return 0.5 + 0.05 * std::cos(3 * t); }, [](double t) { return 1.0 + 0.05 * std::cos(3 * t); });
  const LOmegaInfo b = detect_L_omega(band);
  CHECK(b.kind == LOmegaInfo::Kind::Trivial);
  CHECK(b.residual > kSymmetryTolerance);
}

TEST_CASE("korn_constant agrees with a dense solve") {
  for (const TriMesh& mesh : {unit_square(1), unit_square(2), disk(0)}) {
    const KornEstimate est = korn_constant(mesh);
    const auto forms = assemble(mesh);
    ConstraintSet c = constraints_for(mesh, BoundaryCondition::Tangential);
    Eigen::MatrixXd a = Eigen::MatrixXd(restrict_form(forms.grad_grad, c));
    const Eigen::MatrixXd b = Eigen::MatrixXd(restrict_form(forms.sym_sym, c));
    if (est.l_omega.kind == LOmegaInfo::Kind::Rotational) {
      // Remove the rotation field and apply the rank-one correction by hand.
      Vector rot = Vector::Zero(2 * static_cast<int>(mesh.vertex_count()));
      for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const Point x = mesh.vertices()[v] - est.l_omega.center;
        rot(2 * v) = -x.y();
        rot(2 * v + 1) = x.x();
      }
      const Vector qr = c.prolongation.transpose() * forms.curl_functional;
      a -= qr * qr.transpose() / (2 * mesh.area());
      const Vector r = c.prolongation.transpose() * rot;
      // Both forms vanish on the rotation, so any complement has the same spectrum.
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r).householderQ();
      const Eigen::MatrixXd basis = q.rightCols(r.size() - 1);
      const auto dense = dense_eigenpairs(basis.transpose() * a * basis, basis.transpose() * b * basis);
      CHECK(est.kappa_sq == doctest::Approx(dense.values.front()).epsilon(1e-9));
    } else {
      const auto dense = dense_eigenpairs(a, b);
      CHECK(est.kappa_sq == doctest::Approx(dense.values.front()).epsilon(1e-10));
    }
    CHECK(est.eig_residual <= 1e-8);
  }
}

TEST_CASE("square sweep is monotone and bounded by two") {
  double prev = 0;
  for (int level = 1; level <= 4; ++level) {
    const KornEstimate est = korn_constant(unit_square(level));
    CHECK(est.kappa_sq >= prev - 1e-10);
    CHECK(est.kappa_sq <= 2.0 + 1e-9);
    CHECK(est.l_omega.kind == LOmegaInfo::Kind::Trivial);
    CHECK_FALSE(est.deflated);
    CHECK(est.top_eigenspace_dim >= 1);
    prev = est.kappa_sq;
  }
  CHECK(prev >= 1.90);
}

TEST_CASE("the tangential square attains two") {
  // On polygons with pinned corners ∫det∇u = 0, so A = 2B − C on the
  // constrained space and the quotient is 2 − C/B.
  CHECK(null_lagrangian_defect(unit_square(3), BoundaryCondition::Tangential) <= 1e-13);
}

TEST_CASE("quotient of the maximizer") {
  const TriMesh mesh = unit_square(3);
  const KornEstimate est = korn_constant(mesh);
  CHECK(korn_quotient(mesh, est.maximizer, BoundaryCondition::Tangential) ==
        doctest::Approx(est.kappa_sq).epsilon(1e-10));
  CHECK(korn_quotient(mesh, -3.5 * est.maximizer, BoundaryCondition::Tangential) ==
        doctest::Approx(est.kappa_sq).epsilon(1e-10));
  const Vector seed = divfree_seed(mesh, Point(0.5, 0.5), 0.4);
  CHECK(korn_quotient(mesh, seed, BoundaryCondition::Tangential) <= est.kappa_sq + 1e-10);
}

TEST_CASE("Dirichlet constant stays below two and approaches it") {
  for (const TriMesh& mesh : {unit_square(1), unit_square(3), disk(1), annulus(0)}) {
    KornOptions o;
    o.bc = BoundaryCondition::Dirichlet;
    CHECK(korn_constant(mesh, o).kappa_sq <= 2 + 1e-12);
  }
  double prev = 0;
  for (int level = 2; level <= 4; ++level) {
    const TriMesh mesh = unit_square(level);
    KornOptions o;
    o.bc = BoundaryCondition::Dirichlet;
    o.seed = divfree_seed(mesh, Point(0.5, 0.5), 0.4);
    const double k = korn_constant(mesh, o).kappa_sq;
    CHECK(k <= 2 + 1e-12);
    CHECK(k >= prev);
    prev = k;
  }
  CHECK(prev >= 1.95);
}

TEST_CASE("disk is deflated and stable") {
  const KornEstimate e1 = korn_constant(disk(1));
  const KornEstimate e2 = korn_constant(disk(2));
  CHECK(e1.deflated);
  CHECK(e2.deflated);
  CHECK(e2.l_omega.kind == LOmegaInfo::Kind::Rotational);
  CHECK(std::isfinite(e2.kappa_sq));
  CHECK(e2.kappa_sq >= e1.kappa_sq - 1e-10);
  CHECK(std::abs(e2.kappa_sq - e1.kappa_sq) < 0.05);
  CHECK(e2.kappa_sq >= 2.0);
}

TEST_CASE("field ratio quadrature") {
  const TriMesh mesh = disk(2);
  // x⊥ is an infinitesimal rotation.
  CHECK_THROWS_AS(evaluate_field_ratio(mesh, [](const Point& x) { return FieldValue{Point(-x.y(), x.x()), Mat2{0, -1, 1, 0}}; }),
                  InfiniteQuotient);
  // u = (x, 0): |∇u|² = 1, |D(u)|² = 1.
  const FieldRatio r = evaluate_field_ratio(mesh, [](const Point& x) { return FieldValue{Point(x.x(), 0), Mat2{1, 0, 0, 0}}; });
  CHECK(r.korn_quotient == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.grad_norm == doctest::Approx(std::sqrt(mesh.area())).epsilon(1e-14));
  // Radial field is not tangential.
  const FieldRatio s = evaluate_field_ratio(mesh, [](const Point& x) { return FieldValue{x, Mat2::identity()}; });
  CHECK(s.tangency_residual == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(s.korn_quotient == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("empty constrained space is a solver failure") {
  CHECK_THROWS_AS(korn_constant(unit_square(0)), SolverError);
}
