#pragma once

// Thin shells around the unit circle,
//     Ωʰ = { (1 + t) x : x ∈ S¹, t ∈ (h g(x) − h, h g(x)) },
// and the explicit tangential field
//     uʰ((1 + t) x) = (1 + t) x⊥ + h g′(θ) x,
// whose Korn quotient ‖∇uʰ‖ / ‖D(uʰ)‖ grows like h⁻¹.

#include <optional>
#include <string>
#include <vector>

#include "kornlab/kornfem.hpp"
#include "kornlab/mesh.hpp"

namespace kornlab {

/// Truncated Fourier series g(θ) = c0 + Σ (a_k cos kθ + b_k sin kθ).
struct Profile {
  struct Term {
    int k = 0;
    double cos_coeff = 0;
    double sin_coeff = 0;
  };
  double c0 = 0;
  std::vector<Term> terms;

  double value(double theta) const;
  double d1(double theta) const;
  double d2(double theta) const;
  bool is_constant() const;

  /// Parses sums like "0.2+0.05*cos(3t)" or "0.2 - 0.01*sin(2t)".
  static Profile parse(const std::string& text);
  std::string to_string() const;
};

/// 0.2 + 0.05 cos 3θ.
Profile default_profile();

struct ShellSpec {
  Profile g = default_profile();
  double h = 0.1;
  int angular_resolution = 2048;  ///< θ samples for quadrature
  int radial_layers = 16;         ///< Gauss–Legendre nodes across the thickness
  int mesh_angular = 256;         ///< vertices per ring in shell_mesh
  int mesh_layers = 4;

  /// Throws InvalidInput unless 0 < g < 1/3 on a fine θ sample and 0 < h < 0.5.
  void validate() const;
};

TriMesh shell_mesh(const ShellSpec& spec);
AnalyticField shell_field(const ShellSpec& spec);

/// Tensor θ × t quadrature on Ωʰ and boundary samples on both curves.
std::vector<QuadraturePoint> shell_quadrature(const ShellSpec& spec);
std::vector<BoundarySample> shell_boundary_samples(const ShellSpec& spec);

struct BlowupRow {
  double h = 0;
  double grad_norm = 0;
  double symgrad_norm = 0;
  double ratio = 0;
  double tangency_residual = 0;
};

struct BlowupTable {
  std::vector<BlowupRow> rows;
  /// Least-squares slope of log(ratio) against log(h); needs two rows.
  std::optional<double> slope;
};

/// Rows in the order of h_list, which must be strictly decreasing.
/// Throws InfiniteQuotient for a constant profile.
BlowupTable blowup_experiment(const ShellSpec& spec, const std::vector<double>& h_list);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kornlab
