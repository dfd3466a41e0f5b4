#include "kornlab/kornfem.hpp"

#include <cstdio>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "kornlab/errors.hpp"
#include "kornlab/pencil.hpp"

namespace kornlab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementGeometry {
  std::array<Point, 3> grad_lambda;  // gradients of the barycentric coordinates
  double area;
};

ElementGeometry element(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const Point& p0 = mesh.vertices()[tri[0]];
  const Point& p1 = mesh.vertices()[tri[1]];
  const Point& p2 = mesh.vertices()[tri[2]];
  const double area = mesh.triangle_area(t);
  if (!(area > 1e-14 * mesh.mesh_size() * mesh.mesh_size()))
    throw InvalidInput("singular triangle " + std::to_string(t));
  const double s = 1.0 / (2 * area);
  return {{Point(p1.y() - p2.y(), p2.x() - p1.x()) * s, Point(p2.y() - p0.y(), p0.x() - p2.x()) * s,
           Point(p0.y() - p1.y(), p1.x() - p0.x()) * s},
          area};
}

SparseMatrix from_triplets(Eigen::Index n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Columns of a prolongation are unit vectors with disjoint supports.
SparseMatrix prolongation_from(const TriMesh& mesh, const std::vector<VertexConstraint>& cons,
                               int skip_column = -1) {
  Triplets t;
  int col = 0, out = 0;
  auto column = [&](int row, const Point& dir) {
    if (col++ == skip_column) return;
    if (dir.x() != 0) t.emplace_back(row, out, dir.x());
    if (dir.y() != 0) t.emplace_back(row + 1, out, dir.y());
    ++out;
  };
  for (std::size_t v = 0; v < cons.size(); ++v) {
    const int r = 2 * static_cast<int>(v);
    switch (cons[v].kind) {
      case VertexConstraint::Kind::Free:
        column(r, Point(1, 0));
        column(r, Point(0, 1));
        break;
      case VertexConstraint::Kind::NormalConstrained:
        column(r, Point(-cons[v].normal.y(), cons[v].normal.x()));
        break;
      case VertexConstraint::Kind::Pinned:
        break;
    }
  }
  SparseMatrix p(2 * static_cast<Eigen::Index>(mesh.vertex_count()), out);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

}  // namespace

AssembledForms assemble(const TriMesh& mesh) {
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(mesh.vertex_count());
  Triplets ta, tb, tc;
  ta.reserve(mesh.triangles().size() * 18);
  tb.reserve(mesh.triangles().size() * 36);
  tc.reserve(mesh.triangles().size() * 36);
  Vector q = Vector::Zero(n);
  for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
    const auto geo = element(mesh, t);
    const auto& tri = mesh.triangles()[t];
    for (int a = 0; a < 3; ++a) {
      const Point& ga = geo.grad_lambda[a];
      q[2 * tri[a]] += -ga.y() * geo.area;
      q[2 * tri[a] + 1] += ga.x() * geo.area;
      for (int b = 0; b < 3; ++b) {
        const Point& gb = geo.grad_lambda[b];
        const double gg = ga.dot(gb) * geo.area;
        for (int i = 0; i < 2; ++i) {
          ta.emplace_back(2 * tri[a] + i, 2 * tri[b] + i, gg);
          for (int j = 0; j < 2; ++j) {
            // φ = λ_a e_i: ∇φ = e_i ⊗ ∇λ_a, div φ = ∂_i λ_a.
            const double sym = 0.5 * ((i == j ? ga.dot(gb) : 0.0) + ga[j] * gb[i]);
            tb.emplace_back(2 * tri[a] + i, 2 * tri[b] + j, sym * geo.area);
            tc.emplace_back(2 * tri[a] + i, 2 * tri[b] + j, ga[i] * gb[j] * geo.area);
          }
        }
      }
    }
  }
  return {from_triplets(n, ta), from_triplets(n, tb), from_triplets(n, tc), q};
}

ConstraintSet tangential_constraints(const TriMesh& mesh) {
  std::vector<VertexConstraint> cons(mesh.vertex_count());
  const auto& edges = mesh.boundary_edges();
  for (std::size_t v = 0; v < cons.size(); ++v) {
    if (!mesh.is_boundary_vertex(static_cast<int>(v))) continue;
    const Point& nin = edges[mesh.incoming_edge(static_cast<int>(v))].normal;
    const Point& nout = edges[mesh.outgoing_edge(static_cast<int>(v))].normal;
    const double turn = std::acos(std::clamp(nin.dot(nout), -1.0, 1.0));
    if (turn > kCornerAngle) {
      cons[v].kind = VertexConstraint::Kind::Pinned;
    } else {
      cons[v].kind = VertexConstraint::Kind::NormalConstrained;
      cons[v].normal = (nin + nout).normalized();
    }
  }
  return {cons, prolongation_from(mesh, cons)};
}

ConstraintSet dirichlet_constraints(const TriMesh& mesh) {
  std::vector<VertexConstraint> cons(mesh.vertex_count());
  for (std::size_t v = 0; v < cons.size(); ++v)
    if (mesh.is_boundary_vertex(static_cast<int>(v))) cons[v].kind = VertexConstraint::Kind::Pinned;
  return {cons, prolongation_from(mesh, cons)};
}

ConstraintSet constraints_for(const TriMesh& mesh, BoundaryCondition bc) {
  return bc == BoundaryCondition::Tangential ? tangential_constraints(mesh) : dirichlet_constraints(mesh);
}

SparseMatrix restrict_form(const SparseMatrix& k, const ConstraintSet& c) {
  SparseMatrix r = c.prolongation.transpose() * k * c.prolongation;
  return r;
}

LOmegaInfo detect_L_omega(const TriMesh& mesh) {
  const auto cons = tangential_constraints(mesh).vertices;
  const auto& edges = mesh.boundary_edges();
  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  struct Row {
    Eigen::Vector2d a;
    double b, w;
  };
  std::vector<Row> rows;
  std::vector<std::pair<Point, double>> samples;
  for (std::size_t v = 0; v < cons.size(); ++v) {
    const int vi = static_cast<int>(v);
    if (!mesh.is_boundary_vertex(vi)) continue;
    const double w = 0.5 * (edges[mesh.incoming_edge(vi)].length + edges[mesh.outgoing_edge(vi)].length);
    const Point& x = mesh.vertices()[v];
    samples.emplace_back(x, w);
    if (cons[v].kind == VertexConstraint::Kind::Pinned) {
      rows.push_back({Eigen::Vector2d(1, 0), x.x(), w});
      rows.push_back({Eigen::Vector2d(0, 1), x.y(), w});
    } else {
      // (x − c)⊥·n = x⊥·n − (n_y, −n_x)·c
      const Point& n = cons[v].normal;
      rows.push_back({Eigen::Vector2d(n.y(), -n.x()), -x.y() * n.x() + x.x() * n.y(), w});
    }
  }
  for (const auto& r : rows) {
    normal += r.w * r.a * r.a.transpose();
    rhs += r.w * r.b * r.a;
  }
  LOmegaInfo info;
  const double tr = normal.trace();
  if (!(std::abs(normal.determinant()) > 1e-14 * tr * tr)) {
    info.residual = 1.0;
    return info;
  }
  info.center = normal.ldlt().solve(rhs);
  double misfit = 0, scale = 0;
  for (const auto& r : rows) misfit += r.w * std::pow(r.a.dot(info.center) - r.b, 2);
  for (const auto& [x, w] : samples) scale += w * (x - info.center).squaredNorm();
  info.residual = scale > 0 ? std::sqrt(misfit / scale) : 1.0;
  info.kind = info.residual < kSymmetryTolerance ? LOmegaInfo::Kind::Rotational : LOmegaInfo::Kind::Trivial;
  return info;
}

Vector interpolate(const TriMesh& mesh, const std::function<Point(const Point&)>& field,
                   const ConstraintSet* constraints) {
  Vector u(2 * static_cast<Eigen::Index>(mesh.vertex_count()));
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Point p = field(mesh.vertices()[v]);
    u[2 * v] = p.x();
    u[2 * v + 1] = p.y();
  }
  if (constraints) u = constraints->prolongation * (constraints->prolongation.transpose() * u).eval();
  return u;
}

Point divfree_bump(const Point& x, const Point& center, double radius) {
  const Point d = (x - center) / radius;
  const double rho2 = d.squaredNorm();
  if (rho2 >= 1) return Point::Zero();
  // ψ = (1 − ρ²)⁴, ∇ψ = −8(1 − ρ²)³ (x − c)/R².
  const Point gpsi = -8 * std::pow(1 - rho2, 3) * d / radius;
  return Point(gpsi.y(), -gpsi.x());
}

namespace {

struct Problem {
  ConstraintSet constraints;
  SparseMatrix prolongation;  // possibly with the rotation dof removed
  SparseMatrix a, b;
  Vector q;
  double q_scale = 0;  // 1/(2|Ω|) when the L_Ω correction is active
  LOmegaInfo l_omega;
  bool deflated = false;
};

Problem setup(const TriMesh& mesh, BoundaryCondition bc) {
  Problem p;
  const auto forms = assemble(mesh);
  p.constraints = constraints_for(mesh, bc);
  p.prolongation = p.constraints.prolongation;
  if (bc == BoundaryCondition::Tangential) {
    p.l_omega = detect_L_omega(mesh);
    if (p.l_omega.kind == LOmegaInfo::Kind::Rotational) {
      p.q_scale = 1.0 / (2 * mesh.area());
      const Point c = p.l_omega.center;
      const Vector rot = interpolate(mesh, [&](const Point& x) { return Point(-(x.y() - c.y()), x.x() - c.x()); });
      const Vector red = p.constraints.prolongation.transpose() * rot;
      Eigen::Index j = 0;
      red.cwiseAbs().maxCoeff(&j);
      // Quotients are invariant along the rotation field, so any complement
      // of it carries the same supremum; drop the dof where it is largest.
      p.prolongation = prolongation_from(mesh, p.constraints.vertices, static_cast<int>(j));
      p.deflated = true;
    }
  }
  p.a = p.prolongation.transpose() * forms.grad_grad * p.prolongation;
  p.b = p.prolongation.transpose() * forms.sym_sym * p.prolongation;
  p.q = p.prolongation.transpose() * forms.curl_functional;
  return p;
}

double localization(const TriMesh& mesh, const Vector& u) {
  double total = 0, near = 0;
  for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
    const auto geo = element(mesh, t);
    const auto& tri = mesh.triangles()[t];
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    bool touches = false;
    for (int a = 0; a < 3; ++a) {
      g.row(0) += u[2 * tri[a]] * geo.grad_lambda[a].transpose();
      g.row(1) += u[2 * tri[a] + 1] * geo.grad_lambda[a].transpose();
      touches = touches || mesh.is_boundary_vertex(tri[a]);
    }
    const double e = g.squaredNorm() * geo.area;
    total += e;
    if (touches) near += e;
  }
  return total > 0 ? near / total : 0.0;
}

}  // namespace

KornEstimate korn_constant(const TriMesh& mesh, const KornOptions& options) {
  const Problem p = setup(mesh, options.bc);
  const Eigen::Index n = p.a.rows();
  if (n == 0) throw SolverError("constrained space is empty");

  LinearOperator k = [&](const Vector& x) -> Vector {
    Vector y = p.a * x;
    if (p.q_scale != 0) y -= (p.q_scale * p.q.dot(x)) * p.q;
    return y;
  };

  PencilOptions po;
  po.eigenpairs = options.eigenpairs;
  po.tolerance = options.tolerance;
  po.max_restarts = options.max_restarts;
  if (options.seed) {
    if (options.seed->size() != 2 * static_cast<Eigen::Index>(mesh.vertex_count()))
      throw InvalidInput("seed vector does not match the mesh");
    po.start = Vector(p.prolongation.transpose() * *options.seed);
  }
  const auto res = largest_eigenpairs(k, p.b, po);
  if (!res.converged)
    {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", res.residual);
    throw SolverError(std::string("eigen iteration did not converge: residual ") + buf);
  }

  KornEstimate est;
  est.kappa_sq = res.values.front();
  est.top_eigenvalues = res.values;
  est.eig_residual = res.residual;
  est.residual_stagnated = res.stagnated;
  est.dof_count = static_cast<int>(n);
  est.iterations = res.restarts;
  est.l_omega = p.l_omega;
  est.deflated = p.deflated;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    if (est.kappa_sq - res.values[i] > options.cluster_width) break;
    ++est.top_eigenspace_dim;
    est.top_vectors.push_back(p.prolongation * res.vectors[i]);
  }
  est.maximizer = est.top_vectors.front();
  est.boundary_localization = localization(mesh, est.maximizer);
  return est;
}

double korn_quotient(const TriMesh& mesh, const Vector& u, BoundaryCondition bc) {
  const auto forms = assemble(mesh);
  double num = u.dot(forms.grad_grad * u);
  if (bc == BoundaryCondition::Tangential && detect_L_omega(mesh).kind == LOmegaInfo::Kind::Rotational) {
    const double qu = forms.curl_functional.dot(u);
    num -= qu * qu / (2 * mesh.area());
  }
  const double den = u.dot(forms.sym_sym * u);
  if (!(den > 0)) throw InfiniteQuotient("symmetric gradient vanishes");
  return num / den;
}

FieldRatio evaluate_field_ratio(std::span<const QuadraturePoint> quadrature,
                                std::span<const BoundarySample> boundary, const AnalyticField& u) {
  double g2 = 0, d2 = 0;
  for (const auto& qp : quadrature) {
    const Mat2 g = u(qp.x).grad;
    g2 += qp.weight * norm_sq(g);
    d2 += qp.weight * norm_sq(0.5 * (g + g.transpose()));
  }
  FieldRatio r;
  r.grad_norm = std::sqrt(g2);
  r.symgrad_norm = std::sqrt(d2);
  for (const auto& b : boundary) r.tangency_residual = std::max(r.tangency_residual, std::abs(u(b.x).u.dot(b.normal)));
  if (!(r.symgrad_norm > 1e-13 * r.grad_norm))
    throw InfiniteQuotient("symmetric gradient vanishes (rigid motion); Korn quotient is infinite");
  r.korn_quotient = r.grad_norm / r.symgrad_norm;
  return r;
}

FieldRatio evaluate_field_ratio(const TriMesh& mesh, const AnalyticField& u) {
  std::vector<QuadraturePoint> quad;
  quad.reserve(3 * mesh.triangles().size());
  for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double w = mesh.triangle_area(t) / 3;
    for (int e = 0; e < 3; ++e)
      quad.push_back({0.5 * (mesh.vertices()[tri[e]] + mesh.vertices()[tri[(e + 1) % 3]]), w});
  }
  std::vector<BoundarySample> bnd;
  for (const auto& e : mesh.boundary_edges())
    bnd.push_back({0.5 * (mesh.vertices()[e.a] + mesh.vertices()[e.b]), e.normal});
  return evaluate_field_ratio(quad, bnd, u);
}

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Tangential ? "tangential" : "dirichlet";
}

std::string to_string(LOmegaInfo::Kind kind) {
  return kind == LOmegaInfo::Kind::Rotational ? "rotational" : "trivial";
}

}  // namespace kornlab
