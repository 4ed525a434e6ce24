// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brinkvem/mesh.hpp"
#include "test_support.hpp"

using namespace brinkvem;

namespace {

PolygonalMesh unit_square_cell() {
  return build_topology({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

double shoelace(const std::vector<Point2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

void expect_closed_cells(const PolygonalMesh& m) {
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto g = element_geometry(m, c);
    Vec2 sum{};
    for (int i = 0; i < g.num_vertices(); ++i) sum += g.edge_length[i] * g.normal[i];
    EXPECT_LT(norm(sum), 1e-12);
  }
}

}  // namespace

TEST(BuildTopology, SingleSquareCell) {
  const auto m = unit_square_cell();
  EXPECT_EQ(m.num_cells(), 1);
  EXPECT_EQ(m.num_edges(), 4);
  for (const auto& e : m.edges()) EXPECT_TRUE(e.is_boundary());
}

TEST(BuildTopology, TwoByTwoGridCounts) {
  const auto m = generate_square_mesh(2);
  EXPECT_EQ(m.num_cells(), 4);
  EXPECT_EQ(m.num_edges(), 12);
  const auto interior = std::count_if(m.edges().begin(), m.edges().end(),
                                      [](const Edge& e) { return !e.is_boundary(); });
  EXPECT_EQ(interior, 4);
  EXPECT_FALSE(m.is_boundary_vertex(4));
}

TEST(BuildTopology, ClockwiseCellIsReorientedAndShared) {
  // Second cell is given clockwise; the shared edge (1,4) must get both sides.
  std::vector<Point2> v{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
  const auto m = build_topology(v, {{0, 1, 4, 5}, {1, 4, 3, 2}});
  EXPECT_GT(shoelace({v[1], v[2], v[3], v[4]}), 0.0);
  for (int c = 0; c < 2; ++c) EXPECT_GT(m.cell_area(c), 0.0);
  int shared = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    if (ed.is_boundary()) continue;
    ++shared;
    EXPECT_EQ(ed.v0, 1);
    EXPECT_EQ(ed.v1, 4);
    EXPECT_EQ(ed.left, 0);  // cell 0 traverses 1 -> 4, the reversed cell 1 traverses 4 -> 1
    EXPECT_EQ(ed.right, 1);
    EXPECT_NEAR(m.edge_normal(e).x, 1.0, 1e-15);
  }
  EXPECT_EQ(shared, 1);
  for (int c = 0; c < 2; ++c) {
    for (const auto& ce : m.cell_edges(c)) {
      if (m.edges()[ce.edge].is_boundary()) continue;
      EXPECT_EQ(ce.sign, c == 0 ? 1 : -1);
    }
  }
}

TEST(BuildTopology, RejectsBadInput) {
  std::vector<Point2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_THROW(build_topology(v, {{0, 1}}), MeshError);
  EXPECT_THROW(build_topology(v, {{0, 1, 1, 2}}), MeshError);
  EXPECT_THROW(build_topology(v, {{0, 1, 7}}), MeshError);
  EXPECT_THROW(build_topology({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), MeshError);
  // Bow-tie.
  EXPECT_THROW(build_topology(v, {{0, 2, 1, 3}}), MeshError);
  // Three cells on one edge.
  std::vector<Point2> w{{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}};
  EXPECT_THROW(build_topology(w, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}), MeshError);
}

TEST(ElementGeometry, UnitSquareAndTriangle) {
  const auto g = element_geometry(unit_square_cell(), 0);
  EXPECT_DOUBLE_EQ(g.area, 1.0);
  EXPECT_DOUBLE_EQ(g.centroid.x, 0.5);
  EXPECT_DOUBLE_EQ(g.centroid.y, 0.5);
  EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(2.0));
  const auto t = polygon_geometry({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(t.area, 0.5);
  EXPECT_NEAR(t.centroid.x, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.centroid.y, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(t.diameter, std::sqrt(2.0));
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(dot(t.normal[i], t.tangent[i]), 0.0, 1e-15);
    EXPECT_GE(t.diameter, t.edge_length[i]);
  }
  // Outward normal of the bottom edge.
  EXPECT_DOUBLE_EQ(t.normal[0].y, -1.0);
}

TEST(ElementGeometry, RegularPentagonArea) {
  std::vector<Point2> p;
  for (int i = 0; i < 5; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 5.0;
    p.push_back({std::cos(a), std::sin(a)});
  }
  const auto g = polygon_geometry(p);
  EXPECT_NEAR(g.area, 2.5 * std::sin(2.0 * std::numbers::pi / 5.0), 1e-14);
  EXPECT_NEAR(g.area, 2.37764, 1e-5);
  EXPECT_NEAR(norm(g.centroid), 0.0, 1e-15);
}

TEST(FanTriangulate, CountsAndAreas) {
  std::mt19937 rng(7);
  for (int n = 3; n <= 10; ++n) {
    const auto g = testkit::random_polygon(rng, n);
    const auto st = fan_triangulate(g);
    ASSERT_FALSE(st.centroid_fan);
    EXPECT_EQ(st.num_triangles(), n - 2);
    EXPECT_EQ(st.num_interior_subedges(), n - 3);
    double sum = 0.0;
    for (double a : st.triangle_area) {
      EXPECT_GT(a, 0.0);
      sum += a;
    }
    EXPECT_NEAR(sum, g.area, 1e-12 * g.area);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(st.subedges[i].polygon_edge, i);
      EXPECT_EQ(st.subedges[i].normal, g.normal[i]);
    }
  }
}

TEST(FanTriangulate, InteriorNormalsAndSides) {
  // Pentagon: two interior diagonals from the first vertex.
  const auto g = polygon_geometry({{0, 0}, {2, 0}, {3, 1.5}, {1, 3}, {-1, 1.5}});
  const auto st = fan_triangulate(g);
  ASSERT_EQ(st.num_triangles(), 3);
  ASSERT_EQ(st.num_interior_subedges(), 2);
  EXPECT_EQ(st.anchor, 0);
  for (const auto& se : st.subedges) {
    if (se.is_boundary()) continue;
    EXPECT_EQ(se.a, 0);
    const Vec2 d = st.points[se.b] - st.points[se.a];
    EXPECT_NEAR(se.normal.x, d.y / norm(d), 1e-15);
    EXPECT_NEAR(se.normal.y, -d.x / norm(d), 1e-15);
  }
  // Each triangle's signed sub-edge normals sum (with lengths) to zero.
  for (int t = 0; t < st.num_triangles(); ++t) {
    Vec2 s{};
    for (int k = 0; k < 3; ++k) {
      const auto& side = st.sides[t][k];
      s += side.sign * st.subedges[side.subedge].length * st.subedges[side.subedge].normal;
    }
    EXPECT_LT(norm(s), 1e-14);
  }
}

TEST(FanTriangulate, RetriesAnotherAnchor) {
  // Reflex at vertex 3 blocks the fan from vertex 0 but not from vertex 3.
  const auto g = polygon_geometry({{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}});
  EXPECT_FALSE(fan_from_vertex(g, 0).has_value());
  const auto st = fan_triangulate(g);
  EXPECT_FALSE(st.centroid_fan);
  EXPECT_EQ(st.anchor, 3);
}

TEST(FanTriangulate, SquareAndTriangle) {
  EXPECT_EQ(fan_triangulate(unit_square_cell(), 0).num_triangles(), 2);
  const auto t = fan_triangulate(polygon_geometry({{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(t.num_triangles(), 1);
  EXPECT_EQ(t.num_interior_subedges(), 0);
}

TEST(Generators, SquareMesh) {
  const auto m1 = generate_square_mesh(1);
  EXPECT_EQ(m1.num_cells(), 1);
  EXPECT_EQ(m1.num_edges(), 4);
  const auto m2 = generate_square_mesh(2);
  EXPECT_EQ(m2.vertex(4), (Point2{0.5, 0.5}));
  const auto m = generate_square_mesh(128);
  EXPECT_EQ(m.num_cells(), 16384);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
  EXPECT_NEAR(mesh_size(generate_square_mesh(4)), std::sqrt(2.0) / 4, 1e-15);
  expect_closed_cells(m2);
}

TEST(Generators, NonConvexMesh) {
  const auto m = generate_nonconvex_mesh(2);
  EXPECT_EQ(m.num_cells(), 8);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto g = element_geometry(m, c);
    EXPECT_EQ(g.num_vertices(), 6);
    int reflex = 0;
    for (int i = 0; i < 6; ++i) {
      if (orient2d(g.vertex(i + 5), g.vertex(i), g.vertex(i + 1)) < 0) ++reflex;
    }
    EXPECT_EQ(reflex, 1);
    EXPECT_NEAR(g.area, 0.125, 1e-14);
  }
  expect_closed_cells(m);
  // Conforming: every interior edge has two cells and boundary length is 4.
  double perimeter = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edges()[e].is_boundary()) perimeter += m.edge_length(e);
  }
  EXPECT_NEAR(perimeter, 4.0, 1e-14);
}

TEST(Regularity, Reports) {
  const auto r = regularity_report(generate_square_mesh(3));
  EXPECT_NEAR(r.min_edge_ratio, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(r.hanging_nodes, 0);
  const auto t = regularity_report(build_topology({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  EXPECT_NEAR(t.min_edge_ratio, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_GT(t.min_triangle_quality, 0.0);
  EXPECT_LE(t.min_triangle_quality, 1.0);
}
