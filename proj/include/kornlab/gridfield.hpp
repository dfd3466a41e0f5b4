#pragma once

// Spectral calculus on an n x n periodic grid standing in for R².
//
// Sample (i, j) sits at x = (-L/2 + iΔ, -L/2 + jΔ), Δ = L/n, and is stored at
// flat index i*n + j. Matrix fields follow ∇u_{ij} = ∂_j u^i, components
// ordered (11, 12, 21, 22).
//
// FFT convention: forward transform unnormalized, inverse carries 1/n².
// Spectral derivatives multiply by iξ and drop the unpaired Nyquist
// frequency (-n/2) along the differentiated axis, so derivatives of real
// fields stay real. Every Fourier multiplier here uses the same effective
// wavevector, which keeps curl∘grad and div∘curl-potential exactly zero.

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "kornlab/mat2.hpp"

namespace kornlab {

class PeriodicGrid {
 public:
  PeriodicGrid(int n, double box_length);

  int n() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_area() const { return spacing() * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  /// Physical coordinate of sample index i along either axis.
  double coordinate(int i) const { return -length_ / 2 + i * spacing(); }
  /// Signed integer frequency of FFT bin k: 0..n/2-1, then -n/2..-1.
  int frequency_index(int k) const { return k < n_ / 2 ? k : k - n_; }
  /// Angular wavenumber 2πm/L of bin k, with the Nyquist bin mapped to 0.
  double wavenumber(int k) const;
  /// Largest representable angular wavenumber π/Δ.
  double max_wavenumber() const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  int n_;
  double length_;
};

using Samples = std::vector<double>;

struct ScalarField {
  PeriodicGrid grid;
  Samples values;

  explicit ScalarField(const PeriodicGrid& g) : grid(g), values(g.size(), 0.0) {}
  ScalarField(const PeriodicGrid& g, Samples v);
  /// Samples f(x1, x2) at every grid point.
  static ScalarField sample(const PeriodicGrid& g, const std::function<double(double, double)>& f);
};

struct VectorField2 {
  PeriodicGrid grid;
  std::array<Samples, 2> comp;

  explicit VectorField2(const PeriodicGrid& g) : grid(g), comp{Samples(g.size()), Samples(g.size())} {}
  VectorField2(ScalarField x, ScalarField y);
  ScalarField component(int c) const { return ScalarField(grid, comp[c]); }
};

struct MatrixField2 {
  PeriodicGrid grid;
  std::array<Samples, 4> comp;  // 11, 12, 21, 22

  explicit MatrixField2(const PeriodicGrid& g)
      : grid(g), comp{Samples(g.size()), Samples(g.size()), Samples(g.size()), Samples(g.size())} {}
  Mat2 at(std::size_t idx) const { return {comp[0][idx], comp[1][idx], comp[2][idx], comp[3][idx]}; }
  void set(std::size_t idx, const Mat2& m);
  /// Row i of the matrix as a vector field (the gradient of u^i when G = ∇u).
  VectorField2 row(int i) const;
  static MatrixField2 constant(const PeriodicGrid& g, const Mat2& m);
};

/// Complex coefficients on the n x n frequency lattice, same flat indexing.
struct Spectrum {
  PeriodicGrid grid;
  std::vector<std::complex<double>> coeffs;

  /// √(Δ²/n² Σ|ĉ|²); equals the L² norm of the source field (Plancherel).
  double l2_norm() const;
};

Spectrum fft(const ScalarField& f);
/// Inverse transform; the imaginary part is discarded.
ScalarField ifft(const Spectrum& s);

/// Spectral partial derivative along axis 0 (x1) or 1 (x2).
ScalarField derivative(const ScalarField& f, int axis);
MatrixField2 grad(const VectorField2& u);
ScalarField div(const VectorField2& u);
/// curl u = ∂₁u² − ∂₂u¹.
ScalarField curl(const VectorField2& u);

/// Δ² · Σ samples.
double integrate(const ScalarField& f);
std::array<double, 2> integrate(const VectorField2& f);
Mat2 integrate(const MatrixField2& f);
double mean(const ScalarField& f);
Mat2 mean(const MatrixField2& f);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField2& f);
double l2_norm(const MatrixField2& f);

/// Relative row-curl residual of a matrix field:
///   ‖(curl G₁, curl G₂)‖₂ / (ξ_max ‖G − mean G‖₂),
/// zero for gradients up to round-off; 0 when G is constant.
double curl_residual(const MatrixField2& g);

inline constexpr double kDefaultCurlTolerance = 1e-8;

/// ∫ det G; throws CurlResidualTooLarge when G is not a gradient.
double det_integral(const MatrixField2& g, double curl_tolerance = kDefaultCurlTolerance);

struct HelmholtzParts {
  VectorField2 gradient_part;
  VectorField2 divfree_part;
  std::array<double, 2> mean;
};
/// z = gradient_part + divfree_part + mean, parts L²-orthogonal.
HelmholtzParts helmholtz(const VectorField2& z);

/// Periodic potential u with grad(u) = G − mean(G). The mean of G is the
/// non-periodic affine part x ↦ mean(G)·x and is returned separately.
struct Potential {
  VectorField2 u;
  Mat2 affine;
};
Potential potential_from_gradient(const MatrixField2& g,
                                  double curl_tolerance = kDefaultCurlTolerance);

/// u_k(x) = u(kx), with u extended by zero outside the box (the R² dilation,
/// not the k²-fold periodic copy).
VectorField2 scaling_sequence(const VectorField2& u, int k);

/// Relative L² mass of f within distance L/8 of the box boundary.
double boundary_mass_fraction(const VectorField2& f);
double boundary_mass_fraction(const ScalarField& f);
/// Boundary mass fraction below 1e-10.
bool is_compactly_supported(const VectorField2& f, double threshold = 1e-10);
bool is_compactly_supported(const ScalarField& f, double threshold = 1e-10);

/// Symmetric part of a matrix field.
MatrixField2 symmetric_part(const MatrixField2& g);

}  // namespace kornlab
