// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brinkvem/assembly.hpp"
#include "brinkvem/study.hpp"

namespace brinkvem {

namespace detail {

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace detail

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "level", "cells", "nodes", "dofs", "h", "energy", "err_u", "err_p", "total", "eta",
      "eff", "div_max", "rate_energy", "rate_pressure", "rate_eta", "seconds"};
  return cols;
}

/// CSV text: header row, then one row per level with 17 significant digits.
inline std::string format_csv(const ConvergenceTable& t) {
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  using detail::fmt17;
  for (const auto& r : t.rows) {
    out << r.level << ',' << r.cells << ',' << r.nodes << ',' << r.dofs << ',' << fmt17(r.h) << ','
        << fmt17(r.energy) << ',' << fmt17(r.err_u) << ',' << fmt17(r.pressure) << ',' << fmt17(r.total) << ','
        << fmt17(r.eta) << ',' << fmt17(r.eff) << ',' << fmt17(r.div_max) << ',' << fmt17(r.rate_energy) << ','
        << fmt17(r.rate_pressure) << ',' << fmt17(r.rate_eta) << ',' << fmt17(r.seconds) << '\n';
  }
  return out.str();
}

inline void export_csv(const ConvergenceTable& t, const std::string& path) {
  detail::write_text(path, format_csv(t));
}

/// Legacy VTK unstructured grid: polygon cells with p_h and div u_h per cell,
/// and Pi_nabla u_h at the vertices averaged over the incident cells.
inline std::string format_vtk(const Discretization& disc, const SolveResult& r) {
  const auto& m = disc.mesh;
  const int nv = m.num_vertices(), nc = m.num_cells();
  std::vector<Vec2> vel(nv);
  std::vector<int> count(nv, 0);
  std::size_t conn = 0;
  for (int c = 0; c < nc; ++c) {
    const auto cv = m.cell(c);
    conn += cv.size() + 1;
    std::vector<Point2> pts;
    for (int v : cv) pts.push_back(m.vertex(v));
    const auto vals = evaluate_projection(disc.elements[c].pack, disc.local_dofs(c, r.velocity), Projection::nabla, pts);
    for (std::size_t i = 0; i < cv.size(); ++i) {
      vel[cv[i]] += vals[i];
      ++count[cv[i]];
    }
  }
  const Eigen::VectorXd div = divergence_field(disc, r);
  using detail::fmt17;
  std::ostringstream out;
  out << "# vtk DataFile Version 3.0\nbrinkvem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v) out << fmt17(m.vertex(v).x) << ' ' << fmt17(m.vertex(v).y) << " 0\n";
  out << "CELLS " << nc << ' ' << conn << '\n';
  for (int c = 0; c < nc; ++c) {
    const auto cv = m.cell(c);
    out << cv.size();
    for (int v : cv) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) out << "7\n";
  out << "CELL_DATA " << nc << "\nSCALARS p_h double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c) out << fmt17(r.pressure[c]) << '\n';
  out << "SCALARS div double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < nc; ++c) out << fmt17(div[c]) << '\n';
  out << "POINT_DATA " << nv << "\nVECTORS u_h double\n";
  for (int v = 0; v < nv; ++v) {
    const Vec2 u = count[v] ? (1.0 / count[v]) * vel[v] : Vec2{};
    out << fmt17(u.x) << ' ' << fmt17(u.y) << " 0\n";
  }
  return out.str();
}

inline void export_vtk(const Discretization& disc, const SolveResult& r, const std::string& path) {
  detail::write_text(path, format_vtk(disc, r));
}

}  // namespace brinkvem
