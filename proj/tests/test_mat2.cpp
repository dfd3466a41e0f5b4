#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kornlab/mat2.hpp"

using namespace kornlab;

namespace {

constexpr double kPi = std::numbers::pi;

double brute_force_dist(const Mat2& f, double* argmin = nullptr) {
  auto d2 = [&](double t) { return norm_sq(f - Rotation(t).matrix()); };
  constexpr int steps = 7200;
  int best = 0;
  for (int i = 1; i < steps; ++i)
    if (d2(2 * kPi * i / steps) < d2(2 * kPi * best / steps)) best = i;
  double lo = 2 * kPi * (best - 1) / steps, hi = 2 * kPi * (best + 1) / steps;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  while (hi - lo > 1e-13) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (d2(a) < d2(b))
      hi = b;
    else
      lo = a;
  }
  if (argmin) *argmin = (lo + hi) / 2;
  return std::sqrt(std::max(0.0, d2((lo + hi) / 2)));
}

}  // namespace

TEST_CASE("split of a worked example") {
  const Mat2 f{1, 2, 3, 4};
  const auto s = split(f);
  CHECK(s.c_a == 2.5);
  CHECK(s.c_b == -0.5);
  CHECK(s.a_a == -1.5);
  CHECK(s.a_b == 2.5);
  CHECK(s.conformal_norm_sq() == 13.0);
  CHECK(s.anticonformal_norm_sq() == 17.0);
  CHECK(s.conformal() + s.anticonformal() == f);
}

TEST_CASE("determinant constant is one half") {
  const Mat2 f{1, 2, 3, 4};
  CHECK(f.det() == -2.0);
  CHECK(det_from_split(f) == -2.0);
  // The constant 2 overshoots by a factor of four.
  CHECK(det_from_split(f, 2.0) == -8.0);
  CHECK(kDetSplitConstant == 0.5);
}

TEST_CASE("cofactor") {
  CHECK(cofactor(Mat2{1, 2, 3, 4}) == Mat2{4, -3, -2, 1});
  const Mat2 f{0.3, -1.2, 2.2, 0.7};
  CHECK(norm(cofactor(f) - f) == doctest::Approx(2 * std::sqrt(split(f).anticonformal_norm_sq())).epsilon(1e-14));
}

TEST_CASE("distance to SO(2) on hand-computed cases") {
  CHECK(dist_so2(Rotation(0.9).matrix()) == doctest::Approx(0).scale(1));
  CHECK(dist_so2(Mat2{2, 0, 0, 2}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // Pure anticonformal: every rotation is equidistant, |F|² + 2 = 4.
  CHECK(dist_so2(Mat2{1, 0, 0, -1}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dist_so2(Mat2{}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("closest rotation") {
  const auto r = closest_rotation(3.0 * Rotation(0.7).matrix());
  REQUIRE(r.has_value());
  CHECK(r->theta() == doctest::Approx(0.7).epsilon(1e-14));
  const auto r2 = closest_rotation(Rotation(-2.0).matrix() + Mat2{0.1, 0.3, 0.3, -0.1});
  REQUIRE(r2.has_value());
  CHECK(std::abs(angle_difference(r2->theta(), -2.0)) < 1e-14);
  CHECK_FALSE(closest_rotation(Mat2{1, 0, 0, -1}).has_value());
  CHECK_FALSE(closest_rotation(Mat2{1, 2, 2, -1} + 1e-14 * Mat2::identity()).has_value());
  CHECK(closest_rotation(Mat2{1, 2, 2, -1} + 1e-9 * Mat2::identity()).has_value());
}

TEST_CASE("rotation angles") {
  CHECK(Rotation(-0.1).theta() == doctest::Approx(2 * kPi - 0.1).epsilon(1e-15));
  CHECK(Rotation(2 * kPi).theta() == doctest::Approx(0).scale(1));
  CHECK(reduce_angle(7 * kPi) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(angle_difference(0.1, 2 * kPi - 0.1) == doctest::Approx(0.2).epsilon(1e-14));
  const Mat2 m = Rotation(kPi / 3).matrix();
  CHECK(m.m11 == doctest::Approx(0.5));
  CHECK(m.m21 == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK((Rotation(1.0) * Rotation(2.5)).theta() == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("random matrix properties") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3, 3);
  double recon = 0, ortho = 0, pyth = 0, det = 0, anti_excess = 0, cofactor_excess = 0;
  for (int s = 0; s < 100000; ++s) {
    const Mat2 f{u(rng), u(rng), u(rng), u(rng)};
    const double scale = std::max(1.0, norm_sq(f));
    const auto sp = split(f);
    recon = std::max(recon, norm(f - sp.conformal() - sp.anticonformal()) / std::sqrt(scale));
    ortho = std::max(ortho, std::abs(frobenius_dot(sp.conformal(), sp.anticonformal())) / scale);
    pyth = std::max(pyth, std::abs(norm_sq(f) - sp.conformal_norm_sq() - sp.anticonformal_norm_sq()) / scale);
    det = std::max(det, std::abs(f.det() - det_from_split(f)) / scale);
    const double d = dist_so2(f);
    anti_excess = std::max(anti_excess, std::sqrt(sp.anticonformal_norm_sq()) - d);
    cofactor_excess = std::max(cofactor_excess, norm(cofactor(f) - f) - 2 * d);
  }
  CHECK(recon <= 1e-12);
  CHECK(ortho <= 1e-12);
  CHECK(pyth <= 1e-12);
  CHECK(det <= 1e-12);
  CHECK(anti_excess <= 0.0);
  CHECK(cofactor_excess <= 1e-12);
}

TEST_CASE("distance and closest rotation against a brute-force scan") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int s = 0; s < 300; ++s) {
    const Mat2 f{u(rng), u(rng), u(rng), u(rng)};
    double theta = 0;
    const double brute = brute_force_dist(f, &theta);
    CHECK(std::abs(dist_so2(f) - brute) <= 1e-9);
    const auto r = closest_rotation(f);
    REQUIRE(r.has_value());
    CHECK(std::abs(angle_difference(r->theta(), theta)) <= 1e-6);
  }
}

TEST_CASE("degenerate threshold scales with the matrix") {
  CHECK(degenerate_threshold(Mat2{}) == doctest::Approx(1e-12));
  CHECK(degenerate_threshold(Mat2{300, 0, 0, -300}) == doctest::Approx(1e-12 * norm(Mat2{300, 0, 0, -300})));
}
