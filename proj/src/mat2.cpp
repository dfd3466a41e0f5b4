#include "kornlab/mat2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kornlab {

double norm(const Mat2& a) { return std::sqrt(norm_sq(a)); }

double reduce_angle(double theta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0) r += two_pi;
  // fmod of a tiny negative number can round up to exactly 2π.
  if (r >= two_pi) r = 0;
  return r;
}

double angle_difference(double a, double b) {
  constexpr double pi = std::numbers::pi;
  double d = std::remainder(a - b, 2 * pi);
  if (d <= -pi) d += 2 * pi;
  return d;
}

Rotation::Rotation(double theta) : theta_(reduce_angle(theta)) {}

Mat2 Rotation::matrix() const {
  const double c = std::cos(theta_), s = std::sin(theta_);
  return {c, -s, s, c};
}

double dist_so2(const Mat2& f) {
  const auto s = split(f);
  const double rc = std::hypot(s.c_a, s.c_b);  // |F^c| / √2
  return std::sqrt(2 * (rc - 1) * (rc - 1) + s.anticonformal_norm_sq());
}

double degenerate_threshold(const Mat2& f) { return 1e-12 * std::max(1.0, norm(f)); }

std::optional<Rotation> closest_rotation(const Mat2& f) {
  const auto s = split(f);
  if (std::sqrt(s.conformal_norm_sq()) < degenerate_threshold(f)) return std::nullopt;
  // F^c = r_c R(θ) with R(θ) = [[cos, −sin], [sin, cos]] ⇒ c_a = r cos θ, c_b = −r sin θ.
  return Rotation(std::atan2(-s.c_b, s.c_a));
}

}  // namespace kornlab
