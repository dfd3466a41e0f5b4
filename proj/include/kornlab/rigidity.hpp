#pragma once

// Extremal fields for the two-dimensional geometric rigidity estimate
//
//     min_R ‖∇u − R‖² ≤ 2 ∫ dist²(∇u, SO(2)).
//
// Given a compactly supported angle field α, the gradient
//     ∇u = R₀ (R(α) + [[a, b], [b, −a]])
// is curl-free exactly when g = (a, b) solves
//     curl g = div f,  div g = curl f,   f = (sin α, cos α − 1),
// and every such field attains equality.

#include <optional>
#include <string>

#include "kornlab/gridfield.hpp"
#include "kornlab/mat2.hpp"

namespace kornlab {

/// f = (sin α, cos α − 1).
VectorField2 build_f(const ScalarField& alpha);

/// Sign of the ⟨ξ⊥, f̂⟩ ξ term in the Fourier solution of the curl/div
/// system. +1 solves the system; −1 is kept only to demonstrate that the
/// opposite sign does not produce a gradient.
enum class SolveSign { Consistent = 1, Flipped = -1 };

/// Fourier solution of curl g = div f, div g = curl f:
///   ĝ(ξ) = ⟨ξ⊥, f̂⟩ ξ/|ξ|² + ⟨ξ, f̂⟩ ξ⊥/|ξ|²,   ξ⊥ = (−ξ₂, ξ₁), ĝ(0) = 0.
VectorField2 solve_g(const VectorField2& f, SolveSign sign = SolveSign::Consistent);

/// G = R₀ (R(α) + [[a, b], [b, −a]]). Throws CurlResidualTooLarge when (α, g)
/// are inconsistent.
MatrixField2 assemble_gradient(const ScalarField& alpha, const VectorField2& g, const Rotation& r0,
                               double curl_tolerance = kDefaultCurlTolerance);

struct ExtremalReport {
  double alpha_norm = 0;
  /// ‖f − mean f‖₂, the Plancherel partner of ‖g‖₂ on the periodic box.
  double f_norm = 0;
  double g_norm = 0;
  /// |∫ f|² / L²: energy of the zero mode that the periodic g cannot carry.
  double f_zero_mode_energy = 0;
  double curl_residual = 0;
  /// Far-field rotation: closest rotation to the mean of G^c over the
  /// boundary margin, where G settles to the value making ∫|G − R|² finite.
  double optimal_theta = 0;
  double lhs = 0;  ///< ∫ |G − R*|²
  double rhs = 0;  ///< ∫ dist²(G, SO(2))
  double ratio = 0;  ///< lhs / (2 rhs)
  /// Rotation minimizing ∫_box |G − R|² (closest rotation to ∫G^c over the
  /// whole box) and the ratio it produces; differs from the far-field one
  /// by the periodic truncation.
  double box_min_theta = 0;
  double box_min_ratio = 0;
  /// max_x dist(G^c(x), SO(2)).
  double conformal_defect = 0;
};

/// Evaluates both sides of the rigidity estimate for a gradient field G.
/// Throws ZeroDistance when dist(G, SO(2)) vanishes identically.
ExtremalReport rigidity_ratio(const MatrixField2& g, double curl_tolerance = kDefaultCurlTolerance);

struct ExtremalField {
  Potential u;  ///< periodic part and affine part of the deformation
  MatrixField2 gradient;
  ExtremalReport report;
};

/// build_f → solve_g → assemble_gradient → potential_from_gradient → rigidity_ratio.
ExtremalField synthesize_extremal(const ScalarField& alpha, const Rotation& r0);

/// Named profile α(x) = amplitude · exp(−|x − center|² / (2 width²)).
struct GaussianBump {
  double amplitude = 1.0;
  double width = 1.0;
  double center_x = 0.0;
  double center_y = 0.0;
};
ScalarField sample_bump(const PeriodicGrid& grid, const GaussianBump& bump);

}  // namespace kornlab
