// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brinkvem/core.hpp"

namespace brinkvem {

/// A mesh edge stored once with v0 < v1.  `left` is the cell that traverses
/// v0 -> v1 counter-clockwise, `right` the cell that traverses v1 -> v0; a
/// missing side is -1.  The global normal points from left to right.
struct Edge {
  int v0 = -1;
  int v1 = -1;
  int left = -1;
  int right = -1;

  bool is_boundary() const { return left < 0 || right < 0; }
  int only_cell() const { return left >= 0 ? left : right; }
};

/// Edge `i` of a cell runs from its local vertex i to i+1.  `sign` is +1
/// when that direction matches v0 -> v1, i.e. when the cell's outward normal
/// equals the global edge normal.
struct CellEdge {
  int edge = -1;
  int sign = 1;
};

struct BoundingBox {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

class PolygonalMesh {
 public:
  PolygonalMesh() = default;

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const CellEdge> cell_edges(int cell) const { return cell_edges_[cell]; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  Point2 vertex(int v) const { return vertices_[v]; }
  std::span<const int> cell(int c) const { return cells_[c]; }

  /// Outward-from-left unit normal of a global edge.
  Vec2 edge_normal(int e) const {
    const auto& ed = edges_[e];
    const Vec2 d = vertices_[ed.v1] - vertices_[ed.v0];
    return rotate_cw(d) / norm(d);
  }
  double edge_length(int e) const {
    return distance(vertices_[edges_[e].v0], vertices_[edges_[e].v1]);
  }

  double cell_area(int c) const {
    double twice = 0.0;
    const auto& cv = cells_[c];
    for (std::size_t i = 0; i < cv.size(); ++i) {
      twice += cross(vertices_[cv[i]], vertices_[cv[(i + 1) % cv.size()]]);
    }
    return 0.5 * twice;
  }

  double total_area() const {
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c) a += cell_area(c);
    return a;
  }

  BoundingBox bounding_box() const {
    BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
    for (const auto& p : vertices_) {
      b.x0 = std::min(b.x0, p.x);
      b.y0 = std::min(b.y0, p.y);
      b.x1 = std::max(b.x1, p.x);
      b.y1 = std::max(b.y1, p.y);
    }
    return b;
  }

  friend PolygonalMesh build_topology(std::vector<Point2> vertices,
                                      std::vector<std::vector<int>> cells);

 private:
  std::vector<Point2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<CellEdge>> cell_edges_;
  std::vector<char> boundary_vertex_;
};

namespace detail {

inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = orient2d(c, d, a);
  const double d2 = orient2d(c, d, b);
  const double d3 = orient2d(a, b, c);
  const double d4 = orient2d(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double signed_area(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * twice;
}

}  // namespace detail

/// Builds edges and adjacency.  Clockwise cells are reversed in place.
inline PolygonalMesh build_topology(std::vector<Point2> vertices,
                                    std::vector<std::vector<int>> cells) {
  const int nv = static_cast<int>(vertices.size());
  for (const auto& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw MeshError("non-finite vertex coordinate");
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cv = cells[c];
    const std::string id = "cell " + std::to_string(c);
    if (cv.size() < 3) throw MeshError(id + " has fewer than 3 vertices");
    for (int v : cv) {
      if (v < 0 || v >= nv) throw MeshError(id + " references vertex out of range");
    }
    std::vector<int> sorted = cv;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw MeshError(id + " has a repeated vertex");
    }
    std::vector<Point2> poly;
    poly.reserve(cv.size());
    double scale = 0.0;
    for (int v : cv) poly.push_back(vertices[v]);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      scale = std::max(scale, distance(poly[i], poly[(i + 1) % poly.size()]));
    }
    const double area = detail::signed_area(poly);
    if (std::abs(area) <= 1e-14 * scale * scale) throw MeshError(id + " has zero area");
    if (area < 0) std::reverse(cv.begin(), cv.end());
    const std::size_t n = cv.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        if (detail::segments_intersect(vertices[cv[i]], vertices[cv[(i + 1) % n]], vertices[cv[j]],
                                       vertices[cv[(j + 1) % n]])) {
          throw MeshError(id + " is not a simple polygon");
        }
      }
    }
  }

  PolygonalMesh m;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  m.cell_edges_.resize(m.cells_.size());
  std::map<std::pair<int, int>, int> lookup;
  for (int c = 0; c < static_cast<int>(m.cells_.size()); ++c) {
    const auto& cv = m.cells_[c];
    const std::size_t n = cv.size();
    m.cell_edges_[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = cv[i];
      const int b = cv[(i + 1) % n];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, m.num_edges());
      if (inserted) m.edges_.push_back(Edge{key.first, key.second, -1, -1});
      Edge& e = m.edges_[it->second];
      const bool forward = (a == e.v0);
      int& slot = forward ? e.left : e.right;
      if (slot >= 0) {
        throw MeshError("non-manifold edge (" + std::to_string(e.v0) + "," + std::to_string(e.v1) +
                        ")");
      }
      slot = c;
      m.cell_edges_[c][i] = CellEdge{it->second, forward ? 1 : -1};
    }
  }
  m.boundary_vertex_.assign(m.vertices_.size(), 0);
  for (const auto& e : m.edges_) {
    if (e.is_boundary()) {
      m.boundary_vertex_[e.v0] = 1;
      m.boundary_vertex_[e.v1] = 1;
    }
  }
  return m;
}

/// Geometry of one polygonal cell; edge i runs from vertex i to vertex i+1.
struct ElementGeometry {
  std::vector<Point2> vertices;
  double area = 0.0;
  Point2 centroid;
  double diameter = 0.0;
  std::vector<double> edge_length;
  std::vector<Vec2> normal;   // outward unit normals
  std::vector<Vec2> tangent;  // CCW unit tangents

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  Point2 vertex(int i) const { return vertices[static_cast<std::size_t>(i) % vertices.size()]; }
};

inline ElementGeometry polygon_geometry(std::vector<Point2> pts) {
  ElementGeometry g;
  g.vertices = std::move(pts);
  const std::size_t n = g.vertices.size();
  double twice = 0.0;
  Point2 acc{};
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = g.vertices[i];
    const Point2 b = g.vertices[(i + 1) % n];
    const double w = cross(a, b);
    twice += w;
    acc += w * (a + b);
  }
  g.area = 0.5 * twice;
  if (!(g.area > 0.0)) throw MeshError("element with non-positive area");
  g.centroid = acc / (3.0 * twice);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      g.diameter = std::max(g.diameter, distance(g.vertices[i], g.vertices[j]));
    }
  }
  g.edge_length.resize(n);
  g.normal.resize(n);
  g.tangent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = g.vertices[(i + 1) % n] - g.vertices[i];
    const double len = norm(d);
    g.edge_length[i] = len;
    g.tangent[i] = d / len;
    g.normal[i] = rotate_cw(d) / len;
  }
  return g;
}

inline ElementGeometry element_geometry(const PolygonalMesh& mesh, int cell) {
  std::vector<Point2> pts;
  for (int v : mesh.cell(cell)) pts.push_back(mesh.vertex(v));
  return polygon_geometry(std::move(pts));
}

/// One sub-edge of a sub-triangulation with a fixed unit normal.  Boundary
/// sub-edges coincide with polygon edges and carry the outward normal.
struct SubEdge {
  int a = -1;
  int b = -1;
  Vec2 normal;
  double length = 0.0;
  int polygon_edge = -1;  // -1 for interior sub-edges

  bool is_boundary() const { return polygon_edge >= 0; }
};

/// Side k of a triangle is opposite to its vertex k.
struct SubTriangleSide {
  int subedge = -1;
  int sign = 1;  // +1 when the triangle's outward normal equals the sub-edge normal
};

struct SubTriangulation {
  std::vector<Point2> points;  // polygon vertices, plus the centroid when used as fan apex
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> triangle_area;
  std::vector<std::array<SubTriangleSide, 3>> sides;
  std::vector<SubEdge> subedges;
  int anchor = 0;             // polygon vertex used as fan apex, or -1 for the centroid fan
  bool centroid_fan = false;

  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_subedges() const { return static_cast<int>(subedges.size()); }
  int num_interior_subedges() const {
    return static_cast<int>(std::count_if(subedges.begin(), subedges.end(),
                                          [](const SubEdge& s) { return !s.is_boundary(); }));
  }
  Point2 point(int tri, int k) const { return points[triangles[tri][k]]; }
};

namespace detail {

inline SubTriangulation assemble_subtriangulation(const ElementGeometry& geo,
                                                  std::vector<Point2> points,
                                                  std::vector<std::array<int, 3>> tris) {
  const int nv = geo.num_vertices();
  SubTriangulation st;
  st.points = std::move(points);
  st.triangles = std::move(tris);
  std::map<std::pair<int, int>, int> lookup;
  for (int i = 0; i < nv; ++i) {
    const int a = i;
    const int b = (i + 1) % nv;
    lookup[std::minmax(a, b)] = static_cast<int>(st.subedges.size());
    st.subedges.push_back(SubEdge{a, b, geo.normal[i], geo.edge_length[i], i});
  }
  for (const auto& t : st.triangles) {
    std::array<SubTriangleSide, 3> sides{};
    for (int k = 0; k < 3; ++k) {
      const int p = t[(k + 1) % 3];
      const int q = t[(k + 2) % 3];
      const auto key = std::minmax(p, q);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        // Interior sub-edge: normal is the clockwise rotation of key.first -> key.second.
        const Vec2 d = st.points[key.second] - st.points[key.first];
        it = lookup.emplace(key, static_cast<int>(st.subedges.size())).first;
        st.subedges.push_back(SubEdge{key.first, key.second, rotate_cw(d) / norm(d), norm(d), -1});
      }
      const SubEdge& se = st.subedges[it->second];
      const Vec2 outward = rotate_cw(st.points[q] - st.points[p]);
      sides[k] = SubTriangleSide{it->second, dot(outward, se.normal) > 0 ? 1 : -1};
    }
    st.sides.push_back(sides);
    st.triangle_area.push_back(0.5 * orient2d(st.points[t[0]], st.points[t[1]], st.points[t[2]]));
  }
  return st;
}

}  // namespace detail

/// Fan triangulation from polygon vertex `anchor`; empty when some fan
/// triangle is not positively oriented.
inline std::optional<SubTriangulation> fan_from_vertex(const ElementGeometry& geo, int anchor) {
  const int n = geo.num_vertices();
  const double tol = 1e-10 * geo.area;
  std::vector<std::array<int, 3>> tris;
  for (int i = 1; i + 1 < n; ++i) {
    const int b = (anchor + i) % n;
    const int c = (anchor + i + 1) % n;
    if (!(0.5 * orient2d(geo.vertices[anchor], geo.vertices[b], geo.vertices[c]) > tol)) {
      return std::nullopt;
    }
    tris.push_back({anchor, b, c});
  }
  auto st = detail::assemble_subtriangulation(geo, geo.vertices, std::move(tris));
  st.anchor = anchor;
  return st;
}

namespace detail {

/// Clip a convex polygon to the left half-plane of the directed line a -> b.
inline std::vector<Point2> clip_left(const std::vector<Point2>& poly, Point2 a, Point2 b) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i], q = poly[(i + 1) % n];
    const double sp = orient2d(a, b, p), sq = orient2d(a, b, q);
    if (sp >= 0) out.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
  }
  return out;
}

}  // namespace detail

/// Kernel (set of points seeing the whole boundary) of a simple CCW polygon.
inline std::vector<Point2> polygon_kernel(const ElementGeometry& g) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& p : g.vertices) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  std::vector<Point2> k{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  for (int i = 0; i < g.num_vertices() && !k.empty(); ++i) k = detail::clip_left(k, g.vertex(i), g.vertex(i + 1));
  return k;
}

/// Smallest signed distance from c to the supporting lines of the edges;
/// positive iff c lies strictly inside the kernel.
inline double kernel_margin(const ElementGeometry& g, Point2 c) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.num_vertices(); ++i) {
    m = std::min(m, orient2d(g.vertex(i), g.vertex(i + 1), c) / g.edge_length[i]);
  }
  return m;
}

/// An interior point that sees the whole boundary: the centroid if it
/// does, otherwise the centroid of the kernel.
inline std::optional<Point2> star_center(const ElementGeometry& g) {
  const double tol = 1e-8 * g.diameter;
  if (kernel_margin(g, g.centroid) > tol) return g.centroid;
  const auto k = polygon_kernel(g);
  if (k.size() < 3) return std::nullopt;
  double twice = 0.0;
  Point2 acc{};
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double w = cross(k[i], k[(i + 1) % k.size()]);
    twice += w;
    acc += w * (k[i] + k[(i + 1) % k.size()]);
  }
  if (!(twice > 0.0)) return std::nullopt;
  const Point2 c = acc / (3.0 * twice);
  if (kernel_margin(g, c) > tol) return c;
  return std::nullopt;
}

/// Fan around an interior point that must see every edge.
inline SubTriangulation point_fan_triangulate(const ElementGeometry& geo, Point2 center) {
  const int n = geo.num_vertices();
  std::vector<Point2> pts = geo.vertices;
  pts.push_back(center);
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n; ++i) {
    if (!(orient2d(center, geo.vertex(i), geo.vertex(i + 1)) > 1e-10 * geo.area)) {
      throw MeshError("cell is not star-shaped with respect to the fan center");
    }
    tris.push_back({n, i, (i + 1) % n});
  }
  auto st = detail::assemble_subtriangulation(geo, std::move(pts), std::move(tris));
  st.anchor = -1;
  st.centroid_fan = true;
  return st;
}

/// Fan around the centroid; requires the centroid to see every edge.
inline SubTriangulation centroid_fan_triangulate(const ElementGeometry& geo) {
  return point_fan_triangulate(geo, geo.centroid);
}

/// Fan triangulation of a cell: apex at vertex 0, else the first vertex that
/// yields positive triangles, else an interior star center.
inline SubTriangulation fan_triangulate(const ElementGeometry& geo) {
  for (int a = 0; a < geo.num_vertices(); ++a) {
    if (auto st = fan_from_vertex(geo, a)) return std::move(*st);
  }
  const auto c = star_center(geo);
  if (!c) throw MeshError("cell is not star-shaped with respect to any vertex or interior point");
  return point_fan_triangulate(geo, *c);
}

inline SubTriangulation fan_triangulate(const PolygonalMesh& mesh, int cell) {
  return fan_triangulate(element_geometry(mesh, cell));
}

/// n x n congruent rectangles covering `box`, cells numbered row by row.
inline PolygonalMesh generate_square_mesh(int n, BoundingBox box = {}) {
  if (n < 1) throw InputError("square mesh needs n >= 1");
  std::vector<Point2> v;
  v.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      v.push_back({box.x0 + box.width() * i / n, box.y0 + box.height() * j / n});
    }
  }
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return build_topology(std::move(v), std::move(cells));
}

/// Inset of the staircase cut of the non-convex pattern, as a fraction of the
/// square side: the cut runs (1/2,0) -> (1/2-s,1/2) -> (1/2+s,1/2) -> (1/2,1).
inline constexpr double kNonConvexInset = 0.1;

/// Each square of an n x n grid on the unit square split into two congruent
/// hexagons, each with exactly one reflex vertex.
inline PolygonalMesh generate_nonconvex_mesh(int n, BoundingBox box = {}) {
  if (n < 1) throw InputError("non-convex mesh needs n >= 1");
  std::vector<Point2> v;
  std::map<std::pair<long, long>, int> index;
  // Key vertices on a 4n x 2n integer lattice refined by the inset positions.
  const auto add = [&](double fx, double fy) {
    const auto key = std::make_pair(std::lround(fx * 1e6), std::lround(fy * 1e6));
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(v.size()));
    if (inserted) v.push_back({box.x0 + box.width() * fx, box.y0 + box.height() * fy});
    return it->second;
  };
  const double s = kNonConvexInset;
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto P = [&](double lx, double ly) { return add((i + lx) / n, (j + ly) / n); };
      const int c00 = P(0, 0), c10 = P(1, 0), c11 = P(1, 1), c01 = P(0, 1);
      const int mb = P(0.5, 0), mt = P(0.5, 1);
      const int q1 = P(0.5 - s, 0.5), q2 = P(0.5 + s, 0.5);
      cells.push_back({c00, mb, q1, q2, mt, c01});
      cells.push_back({mb, c10, c11, mt, q2, q1});
    }
  }
  return build_topology(std::move(v), std::move(cells));
}

/// Largest cell diameter.
inline double mesh_size(const PolygonalMesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) h = std::max(h, element_geometry(mesh, c).diameter);
  return h;
}

struct RegularityReport {
  double min_edge_ratio = 1.0;        // min over cells of shortest edge / h_E
  double min_triangle_quality = 1.0;  // min over fan triangles of 4 sqrt(3) |T| / sum |e|^2
  int hanging_nodes = 0;              // vertices lying at a straight angle of some cell
  int centroid_fans = 0;
};

inline double triangle_quality(Point2 a, Point2 b, Point2 c) {
  const double area = 0.5 * orient2d(a, b, c);
  const double s = std::pow(distance(a, b), 2) + std::pow(distance(b, c), 2) +
                   std::pow(distance(c, a), 2);
  return 4.0 * std::sqrt(3.0) * area / s;
}

/// True when vertex i of the polygon sits at a straight angle.
inline bool is_straight_vertex(const ElementGeometry& g, int i) {
  const int n = g.num_vertices();
  const Point2 prev = g.vertex(i + n - 1);
  const Point2 cur = g.vertex(i);
  const Point2 next = g.vertex(i + 1);
  const Vec2 a = cur - prev;
  const Vec2 b = next - cur;
  return std::abs(cross(a, b)) <= 1e-10 * norm(a) * norm(b) && dot(a, b) > 0;
}

inline RegularityReport regularity_report(const PolygonalMesh& mesh) {
  RegularityReport r;
  std::vector<char> hanging(mesh.num_vertices(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto g = element_geometry(mesh, c);
    const double emin = *std::min_element(g.edge_length.begin(), g.edge_length.end());
    r.min_edge_ratio = std::min(r.min_edge_ratio, emin / g.diameter);
    const auto st = fan_triangulate(g);
    if (st.centroid_fan) ++r.centroid_fans;
    for (int t = 0; t < st.num_triangles(); ++t) {
      r.min_triangle_quality =
          std::min(r.min_triangle_quality, triangle_quality(st.point(t, 0), st.point(t, 1), st.point(t, 2)));
    }
    const auto cv = mesh.cell(c);
    for (int i = 0; i < g.num_vertices(); ++i) {
      if (is_straight_vertex(g, i)) hanging[cv[i]] = 1;
    }
  }
  r.hanging_nodes = static_cast<int>(std::count(hanging.begin(), hanging.end(), 1));
  return r;
}

}  // namespace brinkvem
