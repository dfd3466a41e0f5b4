#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kornlab/errors.hpp"
#include "kornlab/gridfield.hpp"

using namespace kornlab;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField gaussian(const PeriodicGrid& g, double cx, double cy, double w, double a = 1.0) {
  return ScalarField::sample(g, [=](double x, double y) {
    return a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * w * w));
  });
}

VectorField2 bump_field(const PeriodicGrid& g) {
  return VectorField2(gaussian(g, 0.5, -0.3, 1.0, 0.8), gaussian(g, -1.0, 0.7, 0.8, -0.6));
}

double max_abs_diff(const Samples& a, const Samples& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(PeriodicGrid(6, 1.0), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid(2, 1.0), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid(8, 0.0), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid(8, -1.0), InvalidInput);
  CHECK_NOTHROW(PeriodicGrid(4, 1.0));
}

TEST_CASE("coordinates and wavenumbers") {
  const PeriodicGrid g(8, 2 * kPi);
  CHECK(g.coordinate(0) == doctest::Approx(-kPi));
  CHECK(g.coordinate(4) == doctest::Approx(0).scale(1));
  CHECK(g.index(2, 3) == 19u);
  CHECK(g.wavenumber(3) == doctest::Approx(3));
  CHECK(g.wavenumber(4) == 0.0);  // Nyquist
  CHECK(g.wavenumber(5) == doctest::Approx(-3));
  CHECK(g.frequency_index(4) == -4);
  CHECK(g.max_wavenumber() == doctest::Approx(4));
}

TEST_CASE("fft matches a naive DFT") {
  const PeriodicGrid g(8, 3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  const Spectrum s = fft(f);
  double err = 0;
  for (int k1 = 0; k1 < 8; ++k1)
    for (int k2 = 0; k2 < 8; ++k2) {
      std::complex<double> acc = 0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          acc += f.values[g.index(i, j)] * std::polar(1.0, -2 * kPi * (k1 * i + k2 * j) / 8.0);
      err = std::max(err, std::abs(acc - s.coeffs[g.index(k1, k2)]));
    }
  CHECK(err < 1e-13);
}

TEST_CASE("fft round trip and Plancherel") {
  const PeriodicGrid g(64, 10.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  CHECK(max_abs_diff(ifft(fft(f)).values, f.values) < 1e-14);
  CHECK(fft(f).l2_norm() == doctest::Approx(l2_norm(f)).epsilon(1e-13));
}

TEST_CASE("spectral derivative of trigonometric modes") {
  const double L = 5.0;
  const PeriodicGrid g(32, L);
  const double k = 2 * kPi * 3 / L;
  const auto f = ScalarField::sample(g, [&](double x, double y) { return std::sin(k * x) * std::cos(2 * k * y); });
  const auto dx = derivative(f, 0);
  const auto dy = derivative(f, 1);
  const auto ex = ScalarField::sample(g, [&](double x, double y) { return k * std::cos(k * x) * std::cos(2 * k * y); });
  const auto ey =
      ScalarField::sample(g, [&](double x, double y) { return -2 * k * std::sin(k * x) * std::sin(2 * k * y); });
  CHECK(max_abs_diff(dx.values, ex.values) < 1e-12);
  CHECK(max_abs_diff(dy.values, ey.values) < 1e-12);

  // The Nyquist mode has no real derivative and is dropped.
  const auto nyq = ScalarField::sample(g, [&](double x, double) { return std::cos(kPi * 32 / L * (x + L / 2)); });
  double m = 0;
  for (double v : derivative(nyq, 0).values) m = std::max(m, std::abs(v));
  CHECK(m < 1e-12);
}

TEST_CASE("vector calculus identities") {
  const PeriodicGrid g(128, 20.0);
  const auto phi = gaussian(g, 0.3, 0.1, 1.1);
  const VectorField2 gradphi(derivative(phi, 0), derivative(phi, 1));
  const double scale = l2_norm(gradphi);
  CHECK(l2_norm(curl(gradphi)) <= 1e-12 * scale);
  // A rotated gradient is divergence-free.
  ScalarField neg = derivative(phi, 0);
  for (auto& v : neg.values) v = -v;
  const VectorField2 perp(derivative(phi, 1), neg);
  CHECK(l2_norm(div(perp)) <= 1e-12 * scale);

  const VectorField2 u = bump_field(g);
  const MatrixField2 gu = grad(u);
  CHECK(max_abs_diff(gu.comp[1], derivative(u.component(0), 1).values) == 0.0);
  CHECK(max_abs_diff(gu.comp[2], derivative(u.component(1), 0).values) == 0.0);
  CHECK(curl_residual(gu) <= 1e-12);
}

TEST_CASE("integration against direct summation") {
  const PeriodicGrid g(256, 20.0);
  const auto f = gaussian(g, 0.0, 0.0, 1.0, 1.5);
  double direct = 0;
  for (double v : f.values) direct += v;
  CHECK(integrate(f) == doctest::Approx(direct * g.cell_area()).epsilon(1e-14));
  CHECK(integrate(f) == doctest::Approx(1.5 * 2 * kPi).epsilon(1e-12));
  CHECK(mean(f) == doctest::Approx(1.5 * 2 * kPi / 400).epsilon(1e-12));
}

TEST_CASE("Helmholtz decomposition") {
  const PeriodicGrid g(128, 20.0);
  VectorField2 z = bump_field(g);
  for (auto& v : z.comp[0]) v += 0.25;
  const auto parts = helmholtz(z);
  CHECK(parts.mean[0] == doctest::Approx(mean(z.component(0))).epsilon(1e-14));
  double dot = 0, recon = 0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      dot += parts.gradient_part.comp[c][i] * parts.divfree_part.comp[c][i];
      recon = std::max(recon, std::abs(parts.gradient_part.comp[c][i] + parts.divfree_part.comp[c][i] +
                                       parts.mean[c] - z.comp[c][i]));
    }
  const double n2 = std::pow(l2_norm(z), 2);
  CHECK(std::abs(dot) * g.cell_area() <= 1e-13 * n2);
  CHECK(recon <= 1e-13);
  CHECK(l2_norm(curl(parts.gradient_part)) <= 1e-12 * l2_norm(z));
  CHECK(l2_norm(div(parts.divfree_part)) <= 1e-12 * l2_norm(z));
}

TEST_CASE("potential from gradient") {
  const PeriodicGrid g(128, 20.0);
  const VectorField2 u = bump_field(g);
  MatrixField2 gu = grad(u);
  const Mat2 a{0.4, -0.2, 0.1, 0.3};
  for (std::size_t i = 0; i < g.size(); ++i) gu.set(i, gu.at(i) + a);
  const Potential p = potential_from_gradient(gu);
  CHECK(norm(p.affine - a) < 1e-12);
  const MatrixField2 back = grad(p.u);
  for (int c = 0; c < 4; ++c) {
    Samples expect = gu.comp[c];
    const double m = (c == 0 ? a.m11 : c == 1 ? a.m12 : c == 2 ? a.m21 : a.m22);
    for (auto& v : expect) v -= m;
    CHECK(max_abs_diff(back.comp[c], expect) < 1e-12);
  }
  // u itself up to its mean.
  for (int c = 0; c < 2; ++c) {
    const double shift = mean(u.component(c)) - mean(p.u.component(c));
    Samples v = p.u.comp[c];
    for (auto& x : v) x += shift;
    CHECK(max_abs_diff(v, u.comp[c]) < 1e-12);
  }

  MatrixField2 bad(g);
  bad.comp[1] = gaussian(g, 0, 0, 1.0).values;  // ∂₁G₁₂ ≠ ∂₂G₁₁
  CHECK_THROWS_AS(potential_from_gradient(bad), CurlResidualTooLarge);
  CHECK_THROWS_AS(det_integral(bad), CurlResidualTooLarge);
}

TEST_CASE("determinant of a gradient integrates to zero") {
  const PeriodicGrid g(256, 20.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-3, 3), w(0.7, 1.3), a(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField2 u(gaussian(g, c(rng), c(rng), w(rng), a(rng)), gaussian(g, c(rng), c(rng), w(rng), a(rng)));
    const MatrixField2 gu = grad(u);
    CHECK(std::abs(det_integral(gu)) <= 1e-8 * std::pow(l2_norm(gu), 2));
  }
}

TEST_CASE("scaling sequence preserves gradient norms") {
  const PeriodicGrid g(256, 20.0);
  const VectorField2 u = bump_field(g);
  const MatrixField2 gu = grad(u);
  const double n0 = l2_norm(gu), s0 = l2_norm(symmetric_part(gu));
  for (int k : {1, 2, 4}) {
    const VectorField2 uk = scaling_sequence(u, k);
    const MatrixField2 gk = grad(uk);
    CHECK(std::abs(l2_norm(gk) / n0 - 1) <= 1e-12);
    CHECK(std::abs(l2_norm(symmetric_part(gk)) / s0 - 1) <= 1e-12);
  }
  CHECK(max_abs_diff(scaling_sequence(u, 1).comp[0], u.comp[0]) == 0.0);
  // u_2 at the grid point x equals u at 2x.
  const VectorField2 u2 = scaling_sequence(u, 2);
  const int n = g.n();
  CHECK(u2.comp[0][g.index(n / 2 + 5, n / 2 - 3)] == u.comp[0][g.index(n / 2 + 10, n / 2 - 6)]);
  CHECK_THROWS_AS(scaling_sequence(u, 0), InvalidInput);
}

TEST_CASE("support check") {
  const PeriodicGrid g(128, 20.0);
  CHECK(is_compactly_supported(gaussian(g, 0, 0, 1.0)));
  CHECK_FALSE(is_compactly_supported(gaussian(g, 0, 0, 4.0)));
  CHECK_FALSE(is_compactly_supported(ScalarField::sample(g, [](double, double) { return 1.0; })));
  CHECK(boundary_mass_fraction(ScalarField::sample(g, [](double, double) { return 1.0; })) ==
        doctest::Approx(1.0 - 0.75 * 0.75).epsilon(0.05));
}
