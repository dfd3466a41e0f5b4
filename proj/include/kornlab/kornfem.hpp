#pragma once

// P1 finite-element estimates of the optimal Korn constant
//
//     κ(Ω)² = sup { min_{A ∈ L_Ω} ‖∇u − A‖² / ‖D(u)‖² : u·n = 0 on ∂Ω }
//
// as the top generalized eigenvalue of the pencil (Ã, B) on the constrained
// P1 space, together with the Dirichlet variant.

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kornlab/mat2.hpp"
#include "kornlab/mesh.hpp"

namespace kornlab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Quadratic forms on the full P1 space, dof 2v + i = component i at vertex v.
struct AssembledForms {
  SparseMatrix grad_grad;     ///< A: ∫ ∇u : ∇v
  SparseMatrix sym_sym;       ///< B: ∫ D(u) : D(v)
  SparseMatrix div_div;       ///< C: ∫ div u div v
  Vector curl_functional;     ///< q with qᵀu = ∫ curl u
};

/// One-point quadrature (exact for piecewise-constant gradients).
/// Throws InvalidInput on a degenerate triangle.
AssembledForms assemble(const TriMesh& mesh);

enum class BoundaryCondition { Tangential, Dirichlet };

/// Corner threshold: adjacent boundary normals turning by more than this
/// pin the vertex.
inline constexpr double kCornerAngle = 0.35;

struct VertexConstraint {
  enum class Kind { Free, NormalConstrained, Pinned };
  Kind kind = Kind::Free;
  Point normal = Point::Zero();  ///< unit normal for NormalConstrained
};

/// Per-vertex constraints plus the prolongation P from reduced to full dofs.
struct ConstraintSet {
  std::vector<VertexConstraint> vertices;
  SparseMatrix prolongation;
  int reduced_dofs() const { return static_cast<int>(prolongation.cols()); }
};

/// u·n = 0: straight boundary → segment normal, corners (turn > kCornerAngle)
/// pinned, curved boundary → bisector of the adjacent edge normals.
ConstraintSet tangential_constraints(const TriMesh& mesh);
ConstraintSet dirichlet_constraints(const TriMesh& mesh);
ConstraintSet constraints_for(const TriMesh& mesh, BoundaryCondition bc);

/// Pᵀ K P.
SparseMatrix restrict_form(const SparseMatrix& k, const ConstraintSet& c);

/// Normalized-residual threshold for accepting a rotational symmetry.
inline constexpr double kSymmetryTolerance = 1e-8;

struct LOmegaInfo {
  enum class Kind { Trivial, Rotational };
  Kind kind = Kind::Trivial;
  Point center = Point::Zero();  ///< least-squares center (reported for both kinds)
  double residual = 0;           ///< normalized boundary misfit of (x − c)⊥ · n
};

/// Decides whether the rotation field (x − c)⊥ is admissible for the
/// tangential constraints, by a least-squares fit of c over boundary
/// vertices (constraint normals; pinned vertices demand x = c).
LOmegaInfo detect_L_omega(const TriMesh& mesh);

struct KornOptions {
  BoundaryCondition bc = BoundaryCondition::Tangential;
  /// Relative Ritz-residual tolerance of the eigen iteration.
  double tolerance = 1e-10;
  /// Eigenvalues within this distance of the top one count toward its multiplicity.
  double cluster_width = 1e-6;
  /// Number of leading eigenpairs to resolve.
  int eigenpairs = 4;
  /// Optional start vector on the full dof space (e.g. a div-free bump).
  std::optional<Vector> seed;
  int max_restarts = 400;
};

struct KornEstimate {
  double kappa_sq = 0;  ///< top Rayleigh quotient, a lower bound for κ(Ω)²
  std::vector<double> top_eigenvalues;
  Vector maximizer;                  ///< full-space dof vector
  std::vector<Vector> top_vectors;   ///< full-space eigenvectors of the top cluster
  double eig_residual = 0;
  bool residual_stagnated = false;  ///< residual stalled at a round-off floor; value fixed to tolerance
  int top_eigenspace_dim = 0;
  int dof_count = 0;
  int iterations = 0;
  LOmegaInfo l_omega;
  bool deflated = false;
  /// Fraction of ‖∇u‖² of the maximizer carried by boundary-adjacent triangles.
  double boundary_localization = 0;
};

KornEstimate korn_constant(const TriMesh& mesh, const KornOptions& options = {});

/// Rayleigh quotient of a full-space vector for the chosen problem,
/// (uᵀÃu)/(uᵀBu) with the L_Ω correction when applicable.
double korn_quotient(const TriMesh& mesh, const Vector& u, BoundaryCondition bc);

/// Interpolates a vector field at the mesh vertices and projects it onto the
/// constrained space.
Vector interpolate(const TriMesh& mesh, const std::function<Point(const Point&)>& field,
                   const ConstraintSet* constraints = nullptr);

/// u = curl(ψ) = (∂₂ψ, −∂₁ψ) for a smooth bump ψ supported in the disk of
/// radius `radius` around `center`; divergence-free and compactly supported.
Point divfree_bump(const Point& x, const Point& center, double radius);

// ---- quadrature evaluation of explicit fields ----

struct FieldValue {
  Point u = Point::Zero();
  Mat2 grad;  ///< ∇u_{ij} = ∂_j u^i
};
using AnalyticField = std::function<FieldValue(const Point&)>;

struct QuadraturePoint {
  Point x;
  double weight;
};
struct BoundarySample {
  Point x;
  Point normal;
};

struct FieldRatio {
  double grad_norm = 0;
  double symgrad_norm = 0;
  double korn_quotient = 0;  ///< grad_norm / symgrad_norm
  double tangency_residual = 0;  ///< max |u · n| over boundary samples
};

/// Quadrature norms of ∇u and D(u). Throws InfiniteQuotient when
/// ‖D(u)‖ ≤ 1e-13 ‖∇u‖ (an infinitesimal rigid motion).
FieldRatio evaluate_field_ratio(std::span<const QuadraturePoint> quadrature,
                                std::span<const BoundarySample> boundary, const AnalyticField& u);
/// Same, with the degree-2 edge-midpoint rule on every triangle and boundary
/// samples at edge midpoints.
FieldRatio evaluate_field_ratio(const TriMesh& mesh, const AnalyticField& u);

std::string to_string(BoundaryCondition bc);
std::string to_string(LOmegaInfo::Kind kind);

}  // namespace kornlab
