#include "kornlab/rigidity.hpp"

#include <algorithm>
#include <cmath>

#include "kornlab/errors.hpp"

namespace kornlab {

VectorField2 build_f(const ScalarField& alpha) {
  VectorField2 f(alpha.grid);
  for (std::size_t k = 0; k < alpha.values.size(); ++k) {
    const double a = alpha.values[k];
    f.comp[0][k] = std::sin(a);
    // cos α − 1 = −2 sin²(α/2) without cancellation for small α.
    const double s = std::sin(a / 2);
    f.comp[1][k] = -2 * s * s;
  }
  return f;
}

VectorField2 solve_g(const VectorField2& f, SolveSign sign) {
  const auto& grid = f.grid;
  const auto f1 = fft(f.component(0));
  const auto f2 = fft(f.component(1));
  Spectrum g1 = f1, g2 = f2;
  const double s = static_cast<int>(sign);
  for (int a = 0; a < grid.n(); ++a) {
    for (int b = 0; b < grid.n(); ++b) {
      const auto k = grid.index(a, b);
      const double x1 = grid.wavenumber(a), x2 = grid.wavenumber(b);
      const double xx = x1 * x1 + x2 * x2;
      if (xx == 0) {
        g1.coeffs[k] = g2.coeffs[k] = 0;
        continue;
      }
      // p = ⟨ξ⊥, f̂⟩, q = ⟨ξ, f̂⟩ with ξ⊥ = (−ξ₂, ξ₁).
      const auto p = -x2 * f1.coeffs[k] + x1 * f2.coeffs[k];
      const auto q = x1 * f1.coeffs[k] + x2 * f2.coeffs[k];
      g1.coeffs[k] = (s * p * x1 - q * x2) / xx;
      g2.coeffs[k] = (s * p * x2 + q * x1) / xx;
    }
  }
  return VectorField2(ifft(g1), ifft(g2));
}

MatrixField2 assemble_gradient(const ScalarField& alpha, const VectorField2& g, const Rotation& r0,
                               double curl_tolerance) {
  if (!(alpha.grid == g.grid)) throw InvalidInput("alpha and g live on different grids");
  const Mat2 r0m = r0.matrix();
  MatrixField2 out(alpha.grid);
  for (std::size_t k = 0; k < alpha.values.size(); ++k) {
    const Mat2 local = Rotation(alpha.values[k]).matrix() + Mat2::anticonformal(g.comp[0][k], g.comp[1][k]);
    out.set(k, r0m * local);
  }
  const double r = curl_residual(out);
  if (r > curl_tolerance) throw CurlResidualTooLarge(r, curl_tolerance);
  return out;
}

namespace {

// Sum of G^c over cells outside the central (L − L/4)² square.
Mat2 margin_conformal_sum(const MatrixField2& g) {
  const auto& grid = g.grid;
  const double inner = grid.box_length() / 2 - grid.box_length() / 8;
  double ca = 0, cb = 0;
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) {
      if (std::abs(grid.coordinate(i)) <= inner && std::abs(grid.coordinate(j)) <= inner) continue;
      const auto s = split(g.at(grid.index(i, j)));
      ca += s.c_a;
      cb += s.c_b;
    }
  }
  return Mat2::conformal(ca, cb);
}

double distance_integral(const MatrixField2& g, const Mat2& r) {
  double s = 0;
  for (std::size_t k = 0; k < g.grid.size(); ++k) s += norm_sq(g.at(k) - r);
  return g.grid.cell_area() * s;
}

}  // namespace

ExtremalReport rigidity_ratio(const MatrixField2& g, double curl_tolerance) {
  ExtremalReport rep;
  rep.curl_residual = curl_residual(g);
  if (rep.curl_residual > curl_tolerance) throw CurlResidualTooLarge(rep.curl_residual, curl_tolerance);

  double rhs = 0, defect = 0;
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    const Mat2 m = g.at(k);
    const double d = dist_so2(m);
    rhs += d * d;
    defect = std::max(defect, dist_so2(split(m).conformal()));
  }
  rep.rhs = g.grid.cell_area() * rhs;
  rep.conformal_defect = defect;
  const double area = g.grid.box_length() * g.grid.box_length();
  if (rep.rhs <= 1e-20 * area)
    throw ZeroDistance("dist(G, SO(2)) vanishes identically; the rigidity estimate is vacuous");

  const auto far = closest_rotation(margin_conformal_sum(g));
  if (!far) throw InvalidInput("conformal part of G vanishes in the far field; no rotation is selected");
  rep.optimal_theta = far->theta();
  rep.lhs = distance_integral(g, far->matrix());
  rep.ratio = rep.lhs / (2 * rep.rhs);

  if (const auto box = closest_rotation(integrate(g))) {
    rep.box_min_theta = box->theta();
    rep.box_min_ratio = distance_integral(g, box->matrix()) / (2 * rep.rhs);
  }
  return rep;
}

ExtremalField synthesize_extremal(const ScalarField& alpha, const Rotation& r0) {
  if (!is_compactly_supported(alpha))
    throw InvalidInput("alpha is not compactly supported: relative L2 mass " +
                       std::to_string(boundary_mass_fraction(alpha)) + " within L/8 of the box boundary");
  const auto f = build_f(alpha);
  const auto g = solve_g(f);
  auto gradient = assemble_gradient(alpha, g, r0);
  auto potential = potential_from_gradient(gradient);

  const auto fsum = integrate(f);
  const double area = alpha.grid.box_length() * alpha.grid.box_length();
  VectorField2 centered = f;
  for (int c = 0; c < 2; ++c)
    for (double& v : centered.comp[c]) v -= fsum[c] / area;

  ExtremalReport rep = rigidity_ratio(gradient);
  rep.alpha_norm = l2_norm(alpha);
  rep.f_norm = l2_norm(centered);
  rep.g_norm = l2_norm(g);
  rep.f_zero_mode_energy = (fsum[0] * fsum[0] + fsum[1] * fsum[1]) / area;
  return {std::move(potential), std::move(gradient), rep};
}

ScalarField sample_bump(const PeriodicGrid& grid, const GaussianBump& bump) {
  if (!(bump.width > 0)) throw InvalidInput("bump width must be positive");
  return ScalarField::sample(grid, [&](double x, double y) {
    const double dx = x - bump.center_x, dy = y - bump.center_y;
    return bump.amplitude * std::exp(-(dx * dx + dy * dy) / (2 * bump.width * bump.width));
  });
}

}  // namespace kornlab
