// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"

namespace brinkvem {

namespace detail {

/// Point joined to the edge midpoints when refining a cell.
inline Point2 refinement_center(const ElementGeometry& g) {
  if (auto c = star_center(g)) return *c;
  throw MeshError("cell is not star-shaped with respect to any interior point; cannot refine");
}

}  // namespace detail

/// Split every marked cell into one sub-cell per corner by joining an
/// interior center (the centroid, or the kernel centroid if the centroid does
/// not see the whole boundary) to one point on each side.  A side that
/// already carries a hanging vertex is split there; otherwise its midpoint is
/// inserted, and neighbors gain it as a hanging vertex.
inline PolygonalMesh refine_cells(const PolygonalMesh& mesh, const std::vector<int>& marked) {
  const int nc = mesh.num_cells();
  std::vector<char> is_marked(nc, 0);
  for (int c : marked) {
    if (c < 0 || c >= nc) throw InputError("marked cell " + std::to_string(c) + " out of range");
    is_marked[c] = 1;
  }
  std::vector<Point2> verts = mesh.vertices();
  std::vector<int> edge_mid(mesh.num_edges(), -1);

  // A side is a maximal run of polygon edges between two corners.
  struct Side {
    int first_local = 0;  // local index of the starting corner
    int last_local = 0;   // local index of the ending corner
    int split = -1;       // existing hanging vertex, or -1 for a new midpoint
  };
  std::vector<std::vector<Side>> sides(nc);
  std::vector<std::vector<char>> corner(nc);
  for (int c = 0; c < nc; ++c) {
    if (!is_marked[c]) continue;
    const auto g = element_geometry(mesh, c);
    const auto cv = mesh.cell(c);
    const int n = g.num_vertices();
    corner[c].assign(n, 0);
    for (int i = 0; i < n; ++i) corner[c][i] = !is_straight_vertex(g, i);
    int start = 0;
    while (!corner[c][start]) ++start;
    for (int k = 0; k < n; ++k) {
      const int i = (start + k) % n;
      if (!corner[c][i]) continue;
      int j = (i + 1) % n;
      while (!corner[c][j]) j = (j + 1) % n;
      Side s{i, j, -1};
      if ((i + 1) % n == j) {
        const int e = mesh.cell_edges(c)[i].edge;
        if (edge_mid[e] < 0) {
          edge_mid[e] = static_cast<int>(verts.size());
          verts.push_back(0.5 * (mesh.vertex(cv[i]) + mesh.vertex(cv[j])));
        }
      } else {
        const Point2 mid = 0.5 * (g.vertex(i) + g.vertex(j));
        double best = std::numeric_limits<double>::infinity();
        for (int m = (i + 1) % n; m != j; m = (m + 1) % n) {
          const double d = distance(g.vertex(m), mid);
          if (d < best) {
            best = d;
            s.split = cv[m];
          }
        }
      }
      sides[c].push_back(s);
    }
  }

  // Every cell's vertex loop with the new midpoints inserted.
  std::vector<std::vector<int>> loops(nc);
  for (int c = 0; c < nc; ++c) {
    const auto cv = mesh.cell(c);
    const auto ce = mesh.cell_edges(c);
    for (std::size_t i = 0; i < cv.size(); ++i) {
      loops[c].push_back(cv[i]);
      if (edge_mid[ce[i].edge] >= 0) loops[c].push_back(edge_mid[ce[i].edge]);
    }
  }

  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(nc) + 4 * marked.size());
  for (int c = 0; c < nc; ++c) {
    if (!is_marked[c]) {
      cells.push_back(loops[c]);
      continue;
    }
    const auto cv = mesh.cell(c);
    const auto ce = mesh.cell_edges(c);
    const auto& loop = loops[c];
    // Position in the expanded loop of each old local vertex.
    std::vector<int> pos(cv.size());
    for (std::size_t i = 0, p = 0; i < cv.size(); ++i) {
      pos[i] = static_cast<int>(p);
      p += edge_mid[ce[i].edge] >= 0 ? 2 : 1;
    }
    const int len = static_cast<int>(loop.size());
    std::vector<int> split_pos;
    for (const auto& s : sides[c]) {
      if (s.split >= 0) {
        split_pos.push_back(static_cast<int>(std::find(loop.begin(), loop.end(), s.split) - loop.begin()));
      } else {
        split_pos.push_back(pos[s.first_local] + 1);
      }
    }
    const auto g = element_geometry(mesh, c);
    const int center = static_cast<int>(verts.size());
    verts.push_back(detail::refinement_center(g));
    const int ns = static_cast<int>(split_pos.size());
    for (int k = 0; k < ns; ++k) {
      // Sub-cell around the corner shared by side k and side k+1.
      std::vector<int> sub{center};
      const int from = split_pos[k];
      const int to = split_pos[(k + 1) % ns];
      for (int p = from;; p = (p + 1) % len) {
        sub.push_back(loop[p]);
        if (p == to) break;
      }
      cells.push_back(std::move(sub));
    }
  }

  const double domain = mesh.total_area();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double twice = 0.0;
    const auto& cv = cells[c];
    for (std::size_t i = 0; i < cv.size(); ++i) twice += cross(verts[cv[i]], verts[cv[(i + 1) % cv.size()]]);
    if (0.5 * twice < 1e-14 * domain) {
      throw MeshError("refinement produced a cell of area " + std::to_string(0.5 * twice));
    }
  }
  return build_topology(std::move(verts), std::move(cells));
}

}  // namespace brinkvem
