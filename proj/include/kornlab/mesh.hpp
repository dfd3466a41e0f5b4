#pragma once

// Conforming triangle meshes of planar domains with boundary normals.

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kornlab {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

/// Boundary edge a → b oriented with the domain on its left; the outward
/// normal is the edge direction rotated clockwise.
struct BoundaryEdge {
  int a = 0, b = 0;
  Point normal = Point::Zero();
  double length = 0;
};

class TriMesh {
 public:
  /// Validates and builds a mesh. Boundary edges are derived from the
  /// triangles; when `boundary` is given it must list exactly those edges
  /// (in either orientation). Throws InvalidInput naming the violated
  /// invariant.
  static TriMesh build(std::vector<Point> vertices, std::vector<Triangle> triangles,
                       std::optional<std::vector<std::array<int, 2>>> boundary = std::nullopt,
                       std::string label = "mesh");

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  /// Closed boundary loops as sequences of boundary-edge indices.
  const std::vector<std::vector<int>>& boundary_loops() const { return loops_; }
  const std::string& label() const { return label_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  double triangle_area(std::size_t t) const;
  double area() const;
  /// Longest edge length.
  double mesh_size() const;
  bool is_boundary_vertex(int v) const { return incoming_[v] >= 0; }
  /// Boundary edge ending at / starting from v (−1 for interior vertices).
  int incoming_edge(int v) const { return incoming_[v]; }
  int outgoing_edge(int v) const { return outgoing_[v]; }

  /// Red refinement: every triangle split into four through edge midpoints.
  /// New boundary midpoints are passed through `snap` when given (used to
  /// put them back on a curved boundary).
  TriMesh refined(const std::function<Point(const Point&)>& snap = {}) const;

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::vector<int>> loops_;
  std::vector<int> incoming_, outgoing_;
  std::string label_;
};

/// {"vertices": [[x, y], ...], "triangles": [[i, j, k], ...], "boundary": [[i, j], ...]}
TriMesh read_mesh_json(const std::filesystem::path& path);
void write_mesh_json(const std::filesystem::path& path, const TriMesh& mesh);

/// Unit square [0,1]², two triangles at level 0 split by the (0,0)–(1,1)
/// diagonal, then `level` red refinements.
TriMesh unit_square(int level);

/// Disk with `4·2^level` concentric rings, ring i carrying 6i vertices.
TriMesh disk(int level, Point center = Point::Zero(), double radius = 1.0);

/// Structured band between two star-shaped curves r_in(θ) < r_out(θ) around
/// `center`, with `angular` vertices per ring and `layers` radial layers.
TriMesh radial_band(int angular, int layers, const std::function<double(double)>& r_in,
                    const std::function<double(double)>& r_out, Point center = Point::Zero(),
                    std::string label = "band");

/// Circular annulus with 32·2^level angular and 2·2^level radial divisions.
TriMesh annulus(int level, double r_in = 0.5, double r_out = 1.0, Point center = Point::Zero());

}  // namespace kornlab
