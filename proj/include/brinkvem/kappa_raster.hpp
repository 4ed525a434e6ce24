// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/problem.hpp"

namespace brinkvem {

/// nx x ny grid of inverse permeabilities covering a rectangle.  Row 0 is the
/// top row (largest y), as in an image.
struct KappaRaster {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, top row first

  double at(int i, int j_from_top) const { return values[static_cast<std::size_t>(j_from_top) * nx + i]; }

  /// Value of the raster pixel containing p, with the raster stretched over `box`.
  double lookup(Point2 p, const BoundingBox& box) const {
    const double fx = (p.x - box.x0) / box.width();
    const double fy = (box.y1 - p.y) / box.height();
    const int i = std::clamp(static_cast<int>(std::floor(fx * nx)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor(fy * ny)), 0, ny - 1);
    return at(i, j);
  }
};

inline KappaRaster parse_kappa_raster(std::istream& in) {
  KappaRaster r;
  std::string line;
  if (!std::getline(in, line)) throw InputError("kappa raster: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> r.nx >> r.ny) || r.nx < 1 || r.ny < 1) throw InputError("kappa raster: bad header '" + line + "'");
    std::string extra;
    if (hs >> extra) throw InputError("kappa raster: bad header '" + line + "'");
  }
  r.values.reserve(static_cast<std::size_t>(r.nx) * r.ny);
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw InputError("kappa raster: bad value '" + tok + "'");
      }
      if (used != tok.size()) throw InputError("kappa raster: bad value '" + tok + "'");
      if (!std::isfinite(v) || v <= 0.0) throw InputError("kappa raster: values must be positive");
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (static_cast<int>(row.size()) != r.nx) {
      throw InputError("kappa raster: row " + std::to_string(rows + 1) + " has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(r.nx));
    }
    if (++rows > r.ny) throw InputError("kappa raster: more rows than declared");
    r.values.insert(r.values.end(), row.begin(), row.end());
  }
  if (rows != r.ny) throw InputError("kappa raster: expected " + std::to_string(r.ny) + " rows");
  return r;
}

inline KappaRaster load_kappa_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open kappa raster '" + path + "'");
  return parse_kappa_raster(in);
}

/// Permeability kappa = 1 / raster value at each cell centroid.
inline std::vector<double> kappa_field(const KappaRaster& r, const PolygonalMesh& mesh) {
  const auto box = mesh.bounding_box();
  std::vector<double> k(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) k[c] = 1.0 / r.lookup(element_geometry(mesh, c).centroid, box);
  return k;
}

/// Inverse permeability sampled from the raster at cell centroids.
inline InversePermeability raster_inverse_permeability(KappaRaster r, BoundingBox box) {
  return InversePermeability::function([r = std::move(r), box](Point2 p) { return r.lookup(p, box); });
}

}  // namespace brinkvem
