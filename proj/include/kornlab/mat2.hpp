#pragma once

// 2x2 matrix calculus built on the orthogonal splitting
//     R^{2x2} = conformal ⊕ anticonformal,
//     conformal     = { [[a, b], [-b, a]] },
//     anticonformal = { [[a, b], [ b, -a]] }.
// SO(2) sits inside the conformal plane, which makes the distance to SO(2)
// and the closest rotation available in closed form.

#include <array>
#include <optional>

namespace kornlab {

struct Mat2 {
  double m11 = 0, m12 = 0, m21 = 0, m22 = 0;

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
  static constexpr Mat2 conformal(double a, double b) { return {a, b, -b, a}; }
  static constexpr Mat2 anticonformal(double a, double b) { return {a, b, b, -a}; }

  friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.m11 + y.m11, x.m12 + y.m12, x.m21 + y.m21, x.m22 + y.m22};
  }
  friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.m11 - y.m11, x.m12 - y.m12, x.m21 - y.m21, x.m22 - y.m22};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& x) {
    return {s * x.m11, s * x.m12, s * x.m21, s * x.m22};
  }
  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
            x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

  constexpr Mat2 transpose() const { return {m11, m21, m12, m22}; }
  constexpr double det() const { return m11 * m22 - m12 * m21; }
  constexpr double trace() const { return m11 + m22; }
};

/// Frobenius inner product A : B = tr(AᵀB).
constexpr double frobenius_dot(const Mat2& a, const Mat2& b) {
  return a.m11 * b.m11 + a.m12 * b.m12 + a.m21 * b.m21 + a.m22 * b.m22;
}
constexpr double norm_sq(const Mat2& a) { return frobenius_dot(a, a); }
double norm(const Mat2& a);

/// Coordinates of the two orthogonal projections of a matrix F.
/// conformal part     = [[c_a, c_b], [-c_b, c_a]],
/// anticonformal part = [[a_a, a_b], [ a_b, -a_a]].
struct ConformalSplit {
  double c_a = 0, c_b = 0;
  double a_a = 0, a_b = 0;

  constexpr Mat2 conformal() const { return Mat2::conformal(c_a, c_b); }
  constexpr Mat2 anticonformal() const { return Mat2::anticonformal(a_a, a_b); }
  /// |F^c|² = 2(c_a² + c_b²).
  constexpr double conformal_norm_sq() const { return 2 * (c_a * c_a + c_b * c_b); }
  constexpr double anticonformal_norm_sq() const { return 2 * (a_a * a_a + a_b * a_b); }
};

constexpr ConformalSplit split(const Mat2& f) {
  return {(f.m11 + f.m22) / 2, (f.m12 - f.m21) / 2, (f.m11 - f.m22) / 2, (f.m12 + f.m21) / 2};
}

constexpr Mat2 cofactor(const Mat2& f) { return {f.m22, -f.m21, -f.m12, f.m11}; }

/// Constant k in det F = k (|F^c|² − |F^a|²). Direct expansion gives 1/2.
inline constexpr double kDetSplitConstant = 0.5;

/// k (|F^c|² − |F^a|²); with k = kDetSplitConstant this equals det F.
constexpr double det_from_split(const Mat2& f, double k = kDetSplitConstant) {
  const auto s = split(f);
  return k * (s.conformal_norm_sq() - s.anticonformal_norm_sq());
}

/// A proper rotation R(θ) = [[cos θ, −sin θ], [sin θ, cos θ]], θ stored in [0, 2π).
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(double theta);

  double theta() const { return theta_; }
  Mat2 matrix() const;
  /// Composition R(a)R(b) = R(a + b).
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.theta_ + b.theta_);
  }

 private:
  double theta_ = 0;
};

/// Reduces an angle to [0, 2π).
double reduce_angle(double theta);
/// Signed difference a − b wrapped to (−π, π].
double angle_difference(double a, double b);

/// Distance from F to SO(2) in the Frobenius norm:
/// √(2(r_c − 1)² + |F^a|²), r_c = |F^c|/√2.
double dist_so2(const Mat2& f);

/// Degeneracy threshold for closest_rotation: |F^c| below this means every
/// rotation is equidistant.
double degenerate_threshold(const Mat2& f);

/// The rotation maximizing F : R, i.e. the angle of the conformal part of F.
/// Empty when F^c vanishes (every rotation is a minimizer).
std::optional<Rotation> closest_rotation(const Mat2& f);

}  // namespace kornlab
