#include "kornlab/gridfield.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place 2D complex transform; sign = FFTW_FORWARD or FFTW_BACKWARD.
void transform(std::vector<std::complex<double>>& data, int n, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    // The FFTW planner is not re-entrant.
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!(a == b)) throw InvalidInput("fields live on different grids");
}

double sum_sq(const Samples& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

// Applies a per-frequency multiplier (ξ₁, ξ₂) ↦ m(ξ) to f.
template <class Mult>
ScalarField apply_multiplier(const ScalarField& f, Mult m) {
  auto s = fft(f);
  const auto& g = f.grid;
  for (int a = 0; a < g.n(); ++a)
    for (int b = 0; b < g.n(); ++b) s.coeffs[g.index(a, b)] *= m(g.wavenumber(a), g.wavenumber(b));
  return ifft(s);
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n, double box_length) : n_(n), length_(box_length) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw InvalidInput("grid size must be a power of two >= 4, got " + std::to_string(n));
  if (!(box_length > 0) || !std::isfinite(box_length))
    throw InvalidInput("box length must be positive and finite");
}

double PeriodicGrid::wavenumber(int k) const {
  const int m = frequency_index(k);
  if (m == -n_ / 2) return 0.0;
  return 2 * std::numbers::pi * m / length_;
}

double PeriodicGrid::max_wavenumber() const { return std::numbers::pi / spacing(); }

ScalarField::ScalarField(const PeriodicGrid& g, Samples v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw InvalidInput("sample count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidInput("field contains non-finite samples");
}

ScalarField ScalarField::sample(const PeriodicGrid& g, const std::function<double(double, double)>& f) {
  ScalarField out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out.values[g.index(i, j)] = f(g.coordinate(i), g.coordinate(j));
  return out;
}

VectorField2::VectorField2(ScalarField x, ScalarField y) : grid(x.grid) {
  require_same_grid(x.grid, y.grid);
  comp[0] = std::move(x.values);
  comp[1] = std::move(y.values);
}

void MatrixField2::set(std::size_t idx, const Mat2& m) {
  comp[0][idx] = m.m11;
  comp[1][idx] = m.m12;
  comp[2][idx] = m.m21;
  comp[3][idx] = m.m22;
}

VectorField2 MatrixField2::row(int i) const {
  return VectorField2(ScalarField(grid, comp[2 * i]), ScalarField(grid, comp[2 * i + 1]));
}

MatrixField2 MatrixField2::constant(const PeriodicGrid& g, const Mat2& m) {
  MatrixField2 out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.set(k, m);
  return out;
}

double Spectrum::l2_norm() const {
  double s = 0;
  for (const auto& c : coeffs) s += std::norm(c);
  const double n2 = static_cast<double>(grid.size());
  return std::sqrt(grid.cell_area() * s / n2);
}

Spectrum fft(const ScalarField& f) {
  Spectrum s{f.grid, std::vector<std::complex<double>>(f.values.begin(), f.values.end())};
  transform(s.coeffs, f.grid.n(), FFTW_FORWARD);
  return s;
}

ScalarField ifft(const Spectrum& s) {
  auto data = s.coeffs;
  transform(data, s.grid.n(), FFTW_BACKWARD);
  ScalarField out(s.grid);
  const double scale = 1.0 / static_cast<double>(s.grid.size());
  for (std::size_t k = 0; k < data.size(); ++k) out.values[k] = data[k].real() * scale;
  return out;
}

ScalarField derivative(const ScalarField& f, int axis) {
  const std::complex<double> I(0, 1);
  return apply_multiplier(f, [&](double xi1, double xi2) { return I * (axis == 0 ? xi1 : xi2); });
}

MatrixField2 grad(const VectorField2& u) {
  MatrixField2 out(u.grid);
  for (int i = 0; i < 2; ++i) {
    const auto ui = u.component(i);
    out.comp[2 * i] = derivative(ui, 0).values;
    out.comp[2 * i + 1] = derivative(ui, 1).values;
  }
  return out;
}

ScalarField div(const VectorField2& u) {
  auto d = derivative(u.component(0), 0);
  const auto d2 = derivative(u.component(1), 1);
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] += d2.values[k];
  return d;
}

ScalarField curl(const VectorField2& u) {
  auto c = derivative(u.component(1), 0);
  const auto d = derivative(u.component(0), 1);
  for (std::size_t k = 0; k < c.values.size(); ++k) c.values[k] -= d.values[k];
  return c;
}

double integrate(const ScalarField& f) {
  double s = 0;
  for (double x : f.values) s += x;
  return f.grid.cell_area() * s;
}

std::array<double, 2> integrate(const VectorField2& f) {
  return {integrate(f.component(0)), integrate(f.component(1))};
}

Mat2 integrate(const MatrixField2& f) {
  std::array<double, 4> s{};
  for (int c = 0; c < 4; ++c) s[c] = integrate(ScalarField(f.grid, f.comp[c]));
  return {s[0], s[1], s[2], s[3]};
}

double mean(const ScalarField& f) {
  return integrate(f) / (f.grid.box_length() * f.grid.box_length());
}

Mat2 mean(const MatrixField2& f) {
  const double area = f.grid.box_length() * f.grid.box_length();
  return (1.0 / area) * integrate(f);
}

double l2_norm(const ScalarField& f) { return std::sqrt(f.grid.cell_area() * sum_sq(f.values)); }

double l2_norm(const VectorField2& f) {
  return std::sqrt(f.grid.cell_area() * (sum_sq(f.comp[0]) + sum_sq(f.comp[1])));
}

double l2_norm(const MatrixField2& f) {
  double s = 0;
  for (const auto& c : f.comp) s += sum_sq(c);
  return std::sqrt(f.grid.cell_area() * s);
}

double curl_residual(const MatrixField2& g) {
  const auto c1 = curl(g.row(0));
  const auto c2 = curl(g.row(1));
  const double num = std::hypot(l2_norm(c1), l2_norm(c2));
  const Mat2 m = mean(g);
  MatrixField2 centered = g;
  for (std::size_t k = 0; k < g.grid.size(); ++k) centered.set(k, g.at(k) - m);
  const double den = g.grid.max_wavenumber() * l2_norm(centered);
  if (den == 0) return 0;
  return num / den;
}

double det_integral(const MatrixField2& g, double curl_tolerance) {
  const double r = curl_residual(g);
  if (r > curl_tolerance) throw CurlResidualTooLarge(r, curl_tolerance);
  double s = 0;
  for (std::size_t k = 0; k < g.grid.size(); ++k) s += g.at(k).det();
  return g.grid.cell_area() * s;
}

HelmholtzParts helmholtz(const VectorField2& z) {
  const auto& g = z.grid;
  auto z1 = fft(z.component(0));
  auto z2 = fft(z.component(1));
  Spectrum p1 = z1, p2 = z2;  // gradient part
  Spectrum q1 = z1, q2 = z2;  // divergence-free part
  for (int a = 0; a < g.n(); ++a) {
    for (int b = 0; b < g.n(); ++b) {
      const auto k = g.index(a, b);
      const double xi1 = g.wavenumber(a), xi2 = g.wavenumber(b);
      const double xx = xi1 * xi1 + xi2 * xi2;
      if (a == 0 && b == 0) {
        p1.coeffs[k] = p2.coeffs[k] = q1.coeffs[k] = q2.coeffs[k] = 0;
        continue;
      }
      if (xx == 0) {
        // Both axes at Nyquist: no derivative sees this mode; file it as gradient.
        q1.coeffs[k] = q2.coeffs[k] = 0;
        continue;
      }
      const auto proj = (xi1 * z1.coeffs[k] + xi2 * z2.coeffs[k]) / xx;
      p1.coeffs[k] = proj * xi1;
      p2.coeffs[k] = proj * xi2;
      q1.coeffs[k] = z1.coeffs[k] - p1.coeffs[k];
      q2.coeffs[k] = z2.coeffs[k] - p2.coeffs[k];
    }
  }
  const double area = g.box_length() * g.box_length();
  return {VectorField2(ifft(p1), ifft(p2)), VectorField2(ifft(q1), ifft(q2)),
          {integrate(z.component(0)) / area, integrate(z.component(1)) / area}};
}

Potential potential_from_gradient(const MatrixField2& G, double curl_tolerance) {
  const double r = curl_residual(G);
  if (r > curl_tolerance) throw CurlResidualTooLarge(r, curl_tolerance);
  const auto& g = G.grid;
  VectorField2 u(g);
  const std::complex<double> I(0, 1);
  for (int i = 0; i < 2; ++i) {
    const auto gi1 = fft(ScalarField(g, G.comp[2 * i]));
    const auto gi2 = fft(ScalarField(g, G.comp[2 * i + 1]));
    Spectrum ui = gi1;
    for (int a = 0; a < g.n(); ++a) {
      for (int b = 0; b < g.n(); ++b) {
        const auto k = g.index(a, b);
        const double xi1 = g.wavenumber(a), xi2 = g.wavenumber(b);
        const double xx = xi1 * xi1 + xi2 * xi2;
        // Ĝ_ij = iξ_j û^i  ⇒  û^i = −i ξ·Ĝ_i / |ξ|².
        ui.coeffs[k] = xx == 0 ? 0.0 : -I * (xi1 * gi1.coeffs[k] + xi2 * gi2.coeffs[k]) / xx;
      }
    }
    u.comp[i] = ifft(ui).values;
  }
  return {std::move(u), mean(G)};
}

VectorField2 scaling_sequence(const VectorField2& u, int k) {
  if (k < 1) throw InvalidInput("dilation factor must be a positive integer");
  const auto& g = u.grid;
  const int n = g.n();
  VectorField2 out(g);
  for (int i = 0; i < n; ++i) {
    const long si = static_cast<long>(k) * i - static_cast<long>(k - 1) * n / 2;
    if (si < 0 || si >= n) continue;
    for (int j = 0; j < n; ++j) {
      const long sj = static_cast<long>(k) * j - static_cast<long>(k - 1) * n / 2;
      if (sj < 0 || sj >= n) continue;
      for (int c = 0; c < 2; ++c) out.comp[c][g.index(i, j)] = u.comp[c][g.index(int(si), int(sj))];
    }
  }
  return out;
}

namespace {

double margin_fraction(const PeriodicGrid& g, const std::vector<const Samples*>& comps) {
  const double margin = g.box_length() / 8;
  const double inner = g.box_length() / 2 - margin;
  double total = 0, outer = 0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      double v = 0;
      for (const auto* c : comps) v += (*c)[g.index(i, j)] * (*c)[g.index(i, j)];
      total += v;
      if (std::abs(g.coordinate(i)) > inner || std::abs(g.coordinate(j)) > inner) outer += v;
    }
  }
  return total == 0 ? 0.0 : outer / total;
}

}  // namespace

double boundary_mass_fraction(const VectorField2& f) {
  return margin_fraction(f.grid, {&f.comp[0], &f.comp[1]});
}
double boundary_mass_fraction(const ScalarField& f) { return margin_fraction(f.grid, {&f.values}); }
bool is_compactly_supported(const VectorField2& f, double threshold) {
  return boundary_mass_fraction(f) < threshold;
}
bool is_compactly_supported(const ScalarField& f, double threshold) {
  return boundary_mass_fraction(f) < threshold;
}

MatrixField2 symmetric_part(const MatrixField2& g) {
  MatrixField2 out(g.grid);
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    const Mat2 m = g.at(k);
    out.set(k, 0.5 * (m + m.transpose()));
  }
  return out;
}

}  // namespace kornlab
