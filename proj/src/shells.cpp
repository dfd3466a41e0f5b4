#include "kornlab/shells.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

#include "kornlab/errors.hpp"
#include "kornlab/parallel.hpp"

namespace kornlab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Gauss–Legendre nodes and weights on (−1, 1).
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0);
  w.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1;
      dp = m * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

double Profile::value(double theta) const {
  double g = c0;
  for (const auto& t : terms) g += t.cos_coeff * std::cos(t.k * theta) + t.sin_coeff * std::sin(t.k * theta);
  return g;
}

double Profile::d1(double theta) const {
  double g = 0;
  for (const auto& t : terms) g += t.k * (-t.cos_coeff * std::sin(t.k * theta) + t.sin_coeff * std::cos(t.k * theta));
  return g;
}

double Profile::d2(double theta) const {
  double g = 0;
  for (const auto& t : terms)
    g -= t.k * t.k * (t.cos_coeff * std::cos(t.k * theta) + t.sin_coeff * std::sin(t.k * theta));
  return g;
}

bool Profile::is_constant() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const Term& t) { return t.k == 0 || (t.cos_coeff == 0 && t.sin_coeff == 0); });
}

Profile Profile::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw InvalidInput("empty profile");
  static const std::regex term(
      R"(([+-]?)(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)(?:\*(cos|sin)\((\d+)\*?t\))?|(cos|sin)\((\d+)\*?t\)))");
  Profile p;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::smatch m;
    const std::string rest = s.substr(pos);
    if (!std::regex_search(rest, m, term, std::regex_constants::match_continuous) || m.length(0) == 0)
      throw InvalidInput("cannot parse profile near '" + rest + "'");
    if (pos > 0 && m[1].length() == 0) throw InvalidInput("profile terms must be joined by + or -");
    const double sign = m[1] == "-" ? -1.0 : 1.0;
    double coeff = 1.0;
    std::string fn;
    int k = 0;
    if (m[2].matched) {
      coeff = std::stod(m[2]);
      if (m[3].matched) {
        fn = m[3];
        k = std::stoi(m[4]);
      }
    } else {
      fn = m[5];
      k = std::stoi(m[6]);
    }
    coeff *= sign;
    if (fn.empty() || k == 0) {
      p.c0 += fn == "sin" ? 0.0 : coeff;
    } else {
      auto it = std::find_if(p.terms.begin(), p.terms.end(), [k](const Term& t) { return t.k == k; });
      if (it == p.terms.end()) {
        p.terms.push_back({k, 0, 0});
        it = p.terms.end() - 1;
      }
      (fn == "cos" ? it->cos_coeff : it->sin_coeff) += coeff;
    }
    pos += m.length(0);
  }
  return p;
}

std::string Profile::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << c0;
  for (const auto& t : terms) {
    if (t.cos_coeff != 0) os << (t.cos_coeff < 0 ? "-" : "+") << std::abs(t.cos_coeff) << "*cos(" << t.k << "t)";
    if (t.sin_coeff != 0) os << (t.sin_coeff < 0 ? "-" : "+") << std::abs(t.sin_coeff) << "*sin(" << t.k << "t)";
  }
  return os.str();
}

Profile default_profile() { return Profile{0.2, {{3, 0.05, 0.0}}}; }

void ShellSpec::validate() const {
  if (!(h > 0 && h < 0.5)) throw InvalidInput("shell thickness h must lie in (0, 0.5), got " + std::to_string(h));
  constexpr int samples = 4096;
  for (int i = 0; i < samples; ++i) {
    const double v = g.value(kTwoPi * i / samples);
    if (!(v > 0 && v < 1.0 / 3.0))
      throw InvalidInput("shell profile must take values in (0, 1/3); g = " + std::to_string(v) + " at theta = " +
                         std::to_string(kTwoPi * i / samples));
  }
  if (angular_resolution < 8 || radial_layers < 1 || mesh_angular < 24 || mesh_layers < 1)
    throw InvalidInput("shell resolutions too small");
}

TriMesh shell_mesh(const ShellSpec& spec) {
  spec.validate();
  const double h = spec.h;
  const Profile g = spec.g;
  return radial_band(
      spec.mesh_angular, spec.mesh_layers, [=](double th) { return 1 + h * g.value(th) - h; },
      [=](double th) { return 1 + h * g.value(th); }, Point::Zero(), "shell");
}

AnalyticField shell_field(const ShellSpec& spec) {
  spec.validate();
  const double h = spec.h;
  const Profile g = spec.g;
  return [=](const Point& y) {
    const double r = y.norm();
    const double th = std::atan2(y.y(), y.x());
    const double t = r - 1;
    const double gv = h * g.value(th);
    const double slack = 1e-9 * h;
    if (!(t >= gv - h - slack && t <= gv + slack))
      throw InvalidInput("point (" + std::to_string(y.x()) + ", " + std::to_string(y.y()) + ") lies outside the shell");
    const double g1 = g.d1(th), g2 = g.d2(th);
    const Point e = y / r;                          // x ∈ S¹
    const Point dtheta = Point(-y.y(), y.x()) / (r * r);  // ∇θ
    FieldValue out;
    out.u = Point(-y.y(), y.x()) + h * g1 * e;
    // ∇(y⊥) = [[0, −1], [1, 0]]; ∂_j(g′(θ) y_i / r) = g″ (y_i/r) ∂_jθ + g′ (δ_ij/r − y_i y_j / r³).
    const double ir = 1 / r, ir3 = ir * ir * ir;
    out.grad = Mat2{0, -1, 1, 0} +
               h * Mat2{g2 * e.x() * dtheta.x() + g1 * (ir - y.x() * y.x() * ir3),
                        g2 * e.x() * dtheta.y() + g1 * (-y.x() * y.y() * ir3),
                        g2 * e.y() * dtheta.x() + g1 * (-y.y() * y.x() * ir3),
                        g2 * e.y() * dtheta.y() + g1 * (ir - y.y() * y.y() * ir3)};
    return out;
  };
}

std::vector<QuadraturePoint> shell_quadrature(const ShellSpec& spec) {
  spec.validate();
  std::vector<double> xs, ws;
  gauss_legendre(spec.radial_layers, xs, ws);
  std::vector<QuadraturePoint> q;
  q.reserve(static_cast<std::size_t>(spec.angular_resolution) * spec.radial_layers);
  const double dth = kTwoPi / spec.angular_resolution;
  for (int k = 0; k < spec.angular_resolution; ++k) {
    const double th = dth * k;
    const Point e(std::cos(th), std::sin(th));
    const double t0 = spec.h * spec.g.value(th) - spec.h;
    for (int m = 0; m < spec.radial_layers; ++m) {
      const double t = t0 + spec.h * (1 + xs[m]) / 2;
      const double r = 1 + t;
      q.push_back({r * e, dth * spec.h / 2 * ws[m] * r});
    }
  }
  return q;
}

std::vector<BoundarySample> shell_boundary_samples(const ShellSpec& spec) {
  spec.validate();
  std::vector<BoundarySample> out;
  const double dth = kTwoPi / spec.angular_resolution;
  for (int k = 0; k < spec.angular_resolution; ++k) {
    const double th = dth * k;
    const Point er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
    const double dr = spec.h * spec.g.d1(th);
    for (const double offset : {0.0, -spec.h}) {
      const double r = 1 + spec.h * spec.g.value(th) + offset;
      // Curve r(θ): outward normal ∝ e_r − (r′/r) e_θ on the outer curve, reversed on the inner one.
      Point n = (er - (dr / r) * et).normalized();
      if (offset != 0) n = -n;
      out.push_back({r * er, n});
    }
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0)) throw InvalidInput("slope fit needs distinct abscissae");
  return sxy / sxx;
}

BlowupTable blowup_experiment(const ShellSpec& spec, const std::vector<double>& h_list) {
  if (h_list.empty()) throw InvalidInput("h list is empty");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw InvalidInput("h list must be strictly decreasing");
  if (spec.g.is_constant())
    throw InfiniteQuotient("constant profile: the shell field is a rigid rotation and D(u) = 0");

  BlowupTable table;
  table.rows.resize(h_list.size());
  parallel_for(h_list.size(), [&](std::size_t i) {
    ShellSpec s = spec;
    s.h = h_list[i];
    const auto quad = shell_quadrature(s);
    const auto bnd = shell_boundary_samples(s);
    const auto r = evaluate_field_ratio(quad, bnd, shell_field(s));
    table.rows[i] = {s.h, r.grad_norm, r.symgrad_norm, r.korn_quotient, r.tangency_residual};
  });
  if (table.rows.size() >= 2) {
    std::vector<double> lx, ly;
    for (const auto& r : table.rows) {
      lx.push_back(std::log(r.h));
      ly.push_back(std::log(r.ratio));
    }
    table.slope = fit_slope(lx, ly);
  }
  return table;
}

}  // namespace kornlab
