#include "kornlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

[[noreturn]] void violated(const std::string& invariant, const std::string& detail) {
  throw InvalidInput("mesh invariant violated (" + invariant + "): " + detail);
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

TriMesh TriMesh::build(std::vector<Point> vertices, std::vector<Triangle> triangles,
                       std::optional<std::vector<std::array<int, 2>>> boundary, std::string label) {
  TriMesh m;
  m.label_ = std::move(label);
  const int nv = static_cast<int>(vertices.size());
  if (nv < 3) violated("non-empty", "fewer than three vertices");
  if (triangles.empty()) violated("non-empty", "no triangles");
  for (const auto& p : vertices)
    if (!p.allFinite()) violated("finite coordinates", "vertex with non-finite coordinate");

  std::vector<char> used(nv, 0);
  struct EdgeUse {
    int count = 0;
    int a = -1, b = -1;  // orientation within the first triangle
  };
  std::map<std::pair<int, int>, EdgeUse> edges;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int v : tri)
      if (v < 0 || v >= nv) violated("valid indices", "triangle " + std::to_string(t) + " references vertex " + std::to_string(v));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      violated("valid indices", "triangle " + std::to_string(t) + " repeats a vertex");
    const double area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    if (!(area > 0))
      violated("positive areas", "triangle " + std::to_string(t) + " has signed area " + std::to_string(area) +
                                     " (triangles must be counterclockwise and non-degenerate)");
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      used[a] = 1;
      auto& use = edges[key(a, b)];
      if (use.count == 0) {
        use.a = a;
        use.b = b;
      } else if (use.a == a) {
        violated("consistent orientation", "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                               ") traversed twice in the same direction");
      }
      if (++use.count > 2)
        violated("conforming", "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                   ") shared by more than two triangles");
    }
  }
  for (int v = 0; v < nv; ++v)
    if (!used[v]) violated("no isolated vertices", "vertex " + std::to_string(v) + " belongs to no triangle");

  // A vertex inside another edge's segment is a hanging node; only boundary
  // edges can carry one, since interior edges are shared by two triangles.
  std::vector<std::array<int, 2>> open;
  std::vector<char> on_boundary(nv, 0);
  for (const auto& [k, use] : edges)
    if (use.count == 1) {
      open.push_back({use.a, use.b});
      on_boundary[use.a] = on_boundary[use.b] = 1;
    }
  for (const auto& [a, b] : open) {
    const Point d = vertices[b] - vertices[a];
    const double len2 = d.squaredNorm();
    for (int v = 0; v < nv; ++v) {
      if (!on_boundary[v] || v == a || v == b) continue;
      const Point r = vertices[v] - vertices[a];
      const double t = r.dot(d) / len2;
      if (t <= 1e-9 || t >= 1 - 1e-9) continue;
      if (std::abs(d.x() * r.y() - d.y() * r.x()) <= 1e-12 * len2)
        violated("conforming", "vertex " + std::to_string(v) + " lies inside edge (" + std::to_string(a) + "," +
                                   std::to_string(b) + "), a hanging node");
    }
  }

  m.incoming_.assign(nv, -1);
  m.outgoing_.assign(nv, -1);
  for (const auto& [k, use] : edges) {
    if (use.count != 1) continue;
    BoundaryEdge be;
    be.a = use.a;
    be.b = use.b;
    const Point d = vertices[be.b] - vertices[be.a];
    be.length = d.norm();
    be.normal = Point(d.y(), -d.x()) / be.length;
    const int idx = static_cast<int>(m.boundary_.size());
    if (m.outgoing_[be.a] >= 0 || m.incoming_[be.b] >= 0)
      violated("boundary edges form closed loops", "vertex " + std::to_string(m.outgoing_[be.a] >= 0 ? be.a : be.b) +
                                                       " is shared by more than two boundary edges");
    m.outgoing_[be.a] = idx;
    m.incoming_[be.b] = idx;
    m.boundary_.push_back(be);
  }
  if (m.boundary_.empty()) violated("boundary edges form closed loops", "mesh has no boundary");

  // Outward check against the centroid of the owning triangle.
  for (const auto& tri : triangles) {
    const Point c = (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int be = m.outgoing_[a];
      if (be < 0 || m.boundary_[be].b != tri[(e + 1) % 3]) continue;
      const Point mid = 0.5 * (vertices[a] + vertices[tri[(e + 1) % 3]]);
      if (m.boundary_[be].normal.dot(mid - c) <= 0) violated("outward normals", "boundary edge at vertex " + std::to_string(a));
    }
  }

  if (boundary) {
    std::map<std::pair<int, int>, int> listed;
    for (const auto& [a, b] : *boundary) {
      if (a < 0 || a >= nv || b < 0 || b >= nv) violated("valid indices", "boundary edge references a missing vertex");
      ++listed[key(a, b)];
    }
    if (listed.size() != boundary->size()) violated("boundary matches triangles", "boundary list repeats an edge");
    for (const auto& be : m.boundary_)
      if (!listed.count(key(be.a, be.b)))
        violated("boundary matches triangles", "edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                                                   ") bounds one triangle but is not listed as boundary");
    if (listed.size() != m.boundary_.size())
      violated("boundary matches triangles", "boundary list contains an interior or non-existent edge");
  }

  std::vector<char> seen(m.boundary_.size(), 0);
  for (std::size_t start = 0; start < m.boundary_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<int> loop;
    int e = static_cast<int>(start);
    while (!seen[e]) {
      seen[e] = 1;
      loop.push_back(e);
      e = m.outgoing_[m.boundary_[e].b];
      if (e < 0) violated("boundary edges form closed loops", "open boundary chain");
    }
    if (e != static_cast<int>(start)) violated("boundary edges form closed loops", "boundary chain does not close");
    m.loops_.push_back(std::move(loop));
  }

  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  return m;
}

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double TriMesh::area() const {
  double s = 0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) s += triangle_area(t);
  return s;
}

double TriMesh::mesh_size() const {
  double h = 0;
  for (const auto& tri : triangles_)
    for (int e = 0; e < 3; ++e) h = std::max(h, (vertices_[tri[e]] - vertices_[tri[(e + 1) % 3]]).norm());
  return h;
}

TriMesh TriMesh::refined(const std::function<Point(const Point&)>& snap) const {
  std::vector<Point> verts = vertices_;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto k = key(a, b);
    if (auto it = mid.find(k); it != mid.end()) return it->second;
    Point p = 0.5 * (vertices_[a] + vertices_[b]);
    const bool on_boundary = (outgoing_[a] >= 0 && boundary_[outgoing_[a]].b == b) ||
                             (outgoing_[b] >= 0 && boundary_[outgoing_[b]].b == a);
    if (on_boundary && snap) p = snap(p);
    verts.push_back(p);
    return mid[k] = static_cast<int>(verts.size()) - 1;
  };
  std::vector<Triangle> tris;
  tris.reserve(4 * triangles_.size());
  for (const auto& t : triangles_) {
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    tris.push_back({t[0], m01, m20});
    tris.push_back({m01, t[1], m12});
    tris.push_back({m20, m12, t[2]});
    tris.push_back({m01, m12, m20});
  }
  return build(std::move(verts), std::move(tris), std::nullopt, label_);
}

TriMesh read_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open mesh file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    if (!j.is_object()) throw InvalidInput("mesh file must hold a JSON object");
    for (const auto& [k, v] : j.items())
      if (k != "vertices" && k != "triangles" && k != "boundary") throw InvalidInput("unknown mesh key '" + k + "'");
    std::vector<Point> verts;
    for (const auto& p : j.at("vertices")) {
      if (p.size() != 2) throw InvalidInput("vertex entries must be [x, y]");
      verts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::vector<Triangle> tris;
    for (const auto& t : j.at("triangles")) {
      if (t.size() != 3) throw InvalidInput("triangle entries must be [i, j, k]");
      tris.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    std::optional<std::vector<std::array<int, 2>>> boundary;
    if (j.contains("boundary")) {
      boundary.emplace();
      for (const auto& e : j["boundary"]) {
        if (e.size() != 2) throw InvalidInput("boundary entries must be [i, j]");
        boundary->push_back({e[0].get<int>(), e[1].get<int>()});
      }
    }
    return TriMesh::build(std::move(verts), std::move(tris), std::move(boundary), path.stem().string());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed mesh JSON: " + std::string(e.what()));
  }
}

void write_mesh_json(const std::filesystem::path& path, const TriMesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& p : mesh.vertices()) j["vertices"].push_back({p.x(), p.y()});
  j["triangles"] = mesh.triangles();
  j["boundary"] = nlohmann::json::array();
  for (const auto& e : mesh.boundary_edges()) j["boundary"].push_back({e.a, e.b});
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write mesh file " + path.string());
  out << j.dump() << '\n';
}

}  // namespace kornlab
