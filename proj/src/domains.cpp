#include <cmath>
#include <numbers>

#include "kornlab/errors.hpp"
#include "kornlab/mesh.hpp"

namespace kornlab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Triangulates the strip between two closed rings whose vertices are listed
// counterclockwise starting at angle 0 (angles given per vertex).
void zip_rings(const std::vector<int>& inner, const std::vector<double>& inner_angle,
               const std::vector<int>& outer, const std::vector<double>& outer_angle,
               std::vector<Triangle>& tris) {
  const std::size_t p = inner.size(), q = outer.size();
  std::size_t i = 0, j = 0;
  auto next_angle = [](const std::vector<double>& ang, std::size_t k) {
    return k + 1 < ang.size() ? ang[k + 1] : kTwoPi + ang[0];
  };
  while (i < p || j < q) {
    const bool advance_outer = j < q && (i == p || next_angle(outer_angle, j) <= next_angle(inner_angle, i));
    if (advance_outer) {
      tris.push_back({inner[i % p], outer[j], outer[(j + 1) % q]});
      ++j;
    } else {
      tris.push_back({inner[i], outer[j % q], inner[(i + 1) % p]});
      ++i;
    }
  }
}

}  // namespace

TriMesh unit_square(int level) {
  if (level < 0) throw InvalidInput("refinement level must be non-negative");
  TriMesh m = TriMesh::build({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, {{{0, 1, 2}}, {{0, 2, 3}}},
                             std::nullopt, "square");
  for (int l = 0; l < level; ++l) m = m.refined();
  return m;
}

TriMesh disk(int level, Point center, double radius) {
  if (level < 0) throw InvalidInput("refinement level must be non-negative");
  if (!(radius > 0)) throw InvalidInput("disk radius must be positive");
  const int rings = 4 << level;
  std::vector<Point> verts{center};
  std::vector<Triangle> tris;
  std::vector<int> prev{0};
  std::vector<double> prev_angle{0.0};
  for (int r = 1; r <= rings; ++r) {
    const int count = 6 * r;
    const double rad = radius * r / rings;
    std::vector<int> ring;
    std::vector<double> angle;
    for (int k = 0; k < count; ++k) {
      const double th = kTwoPi * k / count;
      ring.push_back(static_cast<int>(verts.size()));
      angle.push_back(th);
      verts.push_back(center + rad * Point(std::cos(th), std::sin(th)));
    }
    if (r == 1) {
      for (int k = 0; k < count; ++k) tris.push_back({0, ring[k], ring[(k + 1) % count]});
    } else {
      zip_rings(prev, prev_angle, ring, angle, tris);
    }
    prev = std::move(ring);
    prev_angle = std::move(angle);
  }
  return TriMesh::build(std::move(verts), std::move(tris), std::nullopt, "disk");
}

TriMesh radial_band(int angular, int layers, const std::function<double(double)>& r_in,
                    const std::function<double(double)>& r_out, Point center, std::string label) {
  if (angular < 3 || layers < 1) throw InvalidInput("band needs >= 3 angular and >= 1 radial divisions");
  std::vector<Point> verts;
  for (int l = 0; l <= layers; ++l) {
    for (int k = 0; k < angular; ++k) {
      const double th = kTwoPi * k / angular;
      const double a = r_in(th), b = r_out(th);
      if (!(a > 0) || !(b > a)) throw InvalidInput("band radii must satisfy 0 < r_in < r_out");
      const double r = a + (b - a) * l / layers;
      verts.push_back(center + r * Point(std::cos(th), std::sin(th)));
    }
  }
  auto id = [&](int l, int k) { return l * angular + (k % angular); };
  std::vector<Triangle> tris;
  for (int l = 0; l < layers; ++l) {
    for (int k = 0; k < angular; ++k) {
      tris.push_back({id(l, k), id(l + 1, k), id(l + 1, k + 1)});
      tris.push_back({id(l, k), id(l + 1, k + 1), id(l, k + 1)});
    }
  }
  return TriMesh::build(std::move(verts), std::move(tris), std::nullopt, std::move(label));
}

TriMesh annulus(int level, double r_in, double r_out, Point center) {
  if (level < 0) throw InvalidInput("refinement level must be non-negative");
  return radial_band(32 << level, 2 << level, [=](double) { return r_in; }, [=](double) { return r_out; }, center,
                     "annulus");
}

}  // namespace kornlab
