// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"

namespace brinkvem {

// Mesh files are JSON objects {"vertices": [[x, y], ...], "cells": [[i, j, k, ...], ...]}
// with zero-based vertex indices.  Cells with clockwise order are reversed on load.

inline PolygonalMesh parse_mesh(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("mesh file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j.contains("cells")) {
    throw InputError("mesh file needs \"vertices\" and \"cells\"");
  }
  const auto& jv = j["vertices"];
  const auto& jc = j["cells"];
  if (!jv.is_array() || !jc.is_array()) throw InputError("\"vertices\" and \"cells\" must be arrays");
  std::vector<Point2> verts;
  verts.reserve(jv.size());
  for (const auto& p : jv) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InputError("vertex " + std::to_string(verts.size()) + " must be [x, y]");
    }
    verts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(jc.size());
  for (const auto& c : jc) {
    if (!c.is_array()) throw InputError("cell " + std::to_string(cells.size()) + " must be an index array");
    std::vector<int> cv;
    for (const auto& i : c) {
      if (!i.is_number_integer()) throw InputError("cell " + std::to_string(cells.size()) + " has a non-integer index");
      const auto v = i.get<long long>();
      if (v < 0 || v >= static_cast<long long>(verts.size())) {
        throw InputError("cell " + std::to_string(cells.size()) + " index " + std::to_string(v) + " out of range");
      }
      cv.push_back(static_cast<int>(v));
    }
    if (cv.size() < 3) throw InputError("cell " + std::to_string(cells.size()) + " has fewer than 3 vertices");
    cells.push_back(std::move(cv));
  }
  try {
    return build_topology(std::move(verts), std::move(cells));
  } catch (const MeshError& e) {
    throw InputError(std::string("invalid mesh: ") + e.what());
  }
}

inline PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_mesh(text);
}

/// JSON text of a mesh; coordinates carry 17 significant digits.
inline std::string format_mesh(const PolygonalMesh& mesh) {
  std::ostringstream out;
  char buf[64];
  out << "{\n  \"vertices\": [";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point2 p = mesh.vertex(i);
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", p.x, p.y);
    out << (i ? ",\n    " : "\n    ") << buf;
  }
  out << "\n  ],\n  \"cells\": [";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    out << (c ? ",\n    [" : "\n    [");
    const auto cv = mesh.cell(c);
    for (std::size_t k = 0; k < cv.size(); ++k) out << (k ? ", " : "") << cv[k];
    out << "]";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

inline void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write mesh file '" + path + "'");
  out << format_mesh(mesh);
  if (!out) throw InputError("failed writing mesh file '" + path + "'");
}

}  // namespace brinkvem
