#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "cli.hpp"
#include "kornlab/gridfield.hpp"
#include "kornlab/kornfem.hpp"
#include "kornlab/mat2.hpp"
#include "kornlab/rigidity.hpp"

namespace kornlab::cli {

namespace {

class Log {
 public:
  explicit Log(std::ostream& out) : out_(out) {}

  /// Passes when residual <= tolerance.
  void check(const std::string& name, double residual, double tolerance) {
    const bool ok = residual <= tolerance;
    char line[200];
    std::snprintf(line, sizeof line, "%s  %-32s residual %.6e  tol %.1e\n", ok ? "PASS" : "FAIL", name.c_str(),
                  residual, tolerance);
    out_ << line;
    failures_ += ok ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  std::ostream& out_;
  int failures_ = 0;
};

double brute_force_dist(const Mat2& f) {
  auto d2 = [&](double t) { return norm_sq(f - Rotation(t).matrix()); };
  constexpr int steps = 3600;
  int best = 0;
  for (int i = 1; i < steps; ++i)
    if (d2(2 * std::numbers::pi * i / steps) < d2(2 * std::numbers::pi * best / steps)) best = i;
  double lo = 2 * std::numbers::pi * (best - 1) / steps, hi = 2 * std::numbers::pi * (best + 1) / steps;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (d2(a) < d2(b))
      hi = b;
    else
      lo = a;
  }
  return std::sqrt(std::max(0.0, d2((lo + hi) / 2)));
}

void matrix_suite(const SelftestOptions& o, std::mt19937_64& rng, Log& log) {
  std::uniform_real_distribution<double> u(-3, 3);
  double recon = 0, ortho = 0, pyth = 0, det = 0, brute = 0, cof = 0;
  double anti_excess = 0, cofactor_excess = 0;
  const double k = o.break_det_constant ? 2.0 : kDetSplitConstant;
  for (int s = 0; s < o.samples; ++s) {
    const Mat2 f{u(rng), u(rng), u(rng), u(rng)};
    const double scale = std::max(1.0, norm_sq(f));
    const auto sp = split(f);
    recon = std::max(recon, norm(f - sp.conformal() - sp.anticonformal()) / std::sqrt(scale));
    ortho = std::max(ortho, std::abs(frobenius_dot(sp.conformal(), sp.anticonformal())) / scale);
    pyth = std::max(pyth, std::abs(norm_sq(f) - sp.conformal_norm_sq() - sp.anticonformal_norm_sq()) / scale);
    det = std::max(det, std::abs(f.det() - det_from_split(f, k)) / scale);
    const double d = dist_so2(f);
    const double an = std::sqrt(sp.anticonformal_norm_sq());
    const double cf = norm(cofactor(f) - f);
    cof = std::max(cof, std::abs(cf - 2 * an) / std::sqrt(scale));
    anti_excess = std::max(anti_excess, an - d);
    cofactor_excess = std::max(cofactor_excess, cf - 2 * d);
    if (s < 2000) brute = std::max(brute, std::abs(d - brute_force_dist(f)));
  }
  log.check("mat2.reconstruction", recon, 1e-12);
  log.check("mat2.orthogonality", ortho, 1e-12);
  log.check("mat2.pythagoras", pyth, 1e-12);
  log.check("mat2.det_identity", det, 1e-12);
  log.check("mat2.dist_brute_force", brute, 1e-9);
  log.check("mat2.cofactor_anticonformal", cof, 1e-12);
  log.check("mat2.dist_above_anticonformal", std::max(0.0, anti_excess), 1e-12);
  log.check("mat2.cofactor_below_two_dist", std::max(0.0, cofactor_excess), 1e-12);
}

/// Sum of a few Gaussian bumps well inside the box.
VectorField2 random_compact_field(const PeriodicGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-3, 3), a(-1, 1), w(0.6, 1.2);
  VectorField2 v(g);
  for (int b = 0; b < 4; ++b) {
    const double cx = c(rng), cy = c(rng), ax = a(rng), ay = a(rng), width = w(rng);
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const double dx = g.coordinate(i) - cx, dy = g.coordinate(j) - cy;
        const double e = std::exp(-(dx * dx + dy * dy) / (2 * width * width));
        v.comp[0][g.index(i, j)] += ax * e;
        v.comp[1][g.index(i, j)] += ay * e;
      }
  }
  return v;
}

void grid_suite(std::mt19937_64& rng, Log& log) {
  const PeriodicGrid g(128, 20.0);
  const VectorField2 u = random_compact_field(g, rng);

  const ScalarField f = u.component(0);
  log.check("grid.plancherel", std::abs(fft(f).l2_norm() / l2_norm(f) - 1), 1e-12);

  const auto parts = helmholtz(u);
  double dot = 0, recon = 0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      dot += parts.gradient_part.comp[c][i] * parts.divfree_part.comp[c][i];
      const double r = parts.gradient_part.comp[c][i] + parts.divfree_part.comp[c][i] + parts.mean[c];
      recon = std::max(recon, std::abs(r - u.comp[c][i]));
    }
  const double norm2 = std::pow(l2_norm(u), 2);
  log.check("grid.helmholtz_orthogonality", std::abs(dot * g.cell_area()) / norm2, 1e-12);
  log.check("grid.helmholtz_reconstruction", recon, 1e-12);

  const MatrixField2 gu = grad(u);
  log.check("grid.det_integral", std::abs(det_integral(gu)) / std::pow(l2_norm(gu), 2), 1e-8);

  const ScalarField alpha = sample_bump(g, GaussianBump{});
  const VectorField2 gs = solve_g(build_f(alpha));
  const MatrixField2 field = assemble_gradient(alpha, gs, Rotation(0), 1.0);
  log.check("rigidity.curl_residual", curl_residual(field), 1e-8);
}

void fem_suite(Log& log) {
  double worst = 0;
  for (const TriMesh& mesh : {unit_square(3), disk(1), annulus(0)}) {
    const auto forms = assemble(mesh);
    const auto p = constraints_for(mesh, BoundaryCondition::Dirichlet);
    const SparseMatrix d = restrict_form(2 * forms.sym_sym - forms.grad_grad - forms.div_div, p);
    const SparseMatrix a = restrict_form(forms.grad_grad, p);
    double dmax = 0, amax = 0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(d, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
    worst = std::max(worst, dmax / amax);
  }
  log.check("fem.null_lagrangian_matrix", worst, 1e-13);

  double drop = 0, excess = 0, prev = 0;
  for (int level = 1; level <= 3; ++level) {
    const double k = korn_constant(unit_square(level)).kappa_sq;
    if (level > 1) drop = std::max(drop, prev - k);
    excess = std::max(excess, k - 2);
    prev = k;
  }
  log.check("fem.square_monotone", std::max(0.0, drop), 1e-10);
  log.check("fem.square_at_most_two", std::max(0.0, excess), 1e-9);
}

}  // namespace

int selftest(const SelftestOptions& options, std::ostream& out) {
  std::mt19937_64 rng(options.seed);
  Log log(out);
  matrix_suite(options, rng, log);
  grid_suite(rng, log);
  fem_suite(log);
  out << (log.failures() == 0 ? "all properties passed" : std::to_string(log.failures()) + " properties failed")
      << '\n';
  return log.failures() == 0 ? 0 : kPropertyFailure;
}

}  // namespace kornlab::cli
