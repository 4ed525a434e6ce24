// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "brinkvem/adaptive.hpp"
#include "brinkvem/assembly.hpp"
#include "brinkvem/cases.hpp"
#include "brinkvem/errors.hpp"
#include "brinkvem/estimator.hpp"
#include "brinkvem/mesh_io.hpp"
#include "brinkvem/refine.hpp"

namespace brinkvem {

/// Mesh family of a study: generated square or non-convex grids, or a mesh
/// file that is refined uniformly.
struct MeshSpec {
  enum class Kind { square, nonconvex, file };
  Kind kind = Kind::square;
  std::string path;

  /// Parses "square", "nonconvex" or "file:<path>".
  static MeshSpec parse(const std::string& s) {
    MeshSpec m;
    if (s == "square") {
      m.kind = Kind::square;
    } else if (s == "nonconvex") {
      m.kind = Kind::nonconvex;
    } else if (s.rfind("file:", 0) == 0 && s.size() > 5) {
      m.kind = Kind::file;
      m.path = s.substr(5);
    } else {
      throw InputError("unknown mesh family '" + s + "' (expected square, nonconvex or file:<path>)");
    }
    return m;
  }

  std::string name() const {
    switch (kind) {
      case Kind::square: return "square";
      case Kind::nonconvex: return "nonconvex";
      case Kind::file: return "file:" + path;
    }
    return "";
  }
};

/// Mesh of refinement level `level`: generated families use n * 2^level
/// cells per side, files are refined uniformly `level` times.
inline PolygonalMesh study_mesh(const MeshSpec& spec, int n, int level, BoundingBox box = {}) {
  if (level < 0) throw InputError("refinement level must be >= 0");
  if (spec.kind == MeshSpec::Kind::file) {
    auto m = load_mesh(spec.path);
    for (int l = 0; l < level; ++l) {
      std::vector<int> all(m.num_cells());
      for (int c = 0; c < m.num_cells(); ++c) all[c] = c;
      m = refine_cells(m, all);
    }
    return m;
  }
  if (n < 1) throw InputError("mesh resolution must be >= 1");
  const int k = n << level;
  return spec.kind == MeshSpec::Kind::square ? generate_square_mesh(k, box) : generate_nonconvex_mesh(k, box);
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct StudyRow {
  int level = 0;
  int cells = 0;
  int nodes = 0;
  int dofs = 0;
  double h = 0.0;
  double energy = kNaN;    // velocity energy error
  double err_u = kNaN;     // nu * energy
  double pressure = kNaN;  // ||p - p_h||
  double total = kNaN;
  double eta = 0.0;
  double eff = kNaN;
  double div_max = 0.0;    // max |div u_h| * h / max |u_h dofs|
  double rate_energy = kNaN;
  double rate_pressure = kNaN;
  double rate_eta = kNaN;
  double seconds = 0.0;
};

struct ConvergenceTable {
  std::string case_name;
  std::string mesh;
  double nu = 1.0;
  RhsMode rhs = RhsMode::robust;
  std::vector<StudyRow> rows;
};

/// log(e0 / e1) / log(x0 / x1); NaN when either value is not positive.
inline double observed_rate(double x0, double x1, double e0, double e1) {
  if (!(e0 > 0.0 && e1 > 0.0 && x0 > 0.0 && x1 > 0.0) || x0 == x1) return kNaN;
  return std::log(e0 / e1) / std::log(x0 / x1);
}

/// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) return kNaN;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : kNaN;
}

/// max_E |div u_h| scaled by h / ||u_h||_inf, a dimensionless measure.
inline double scaled_divergence(const Discretization& disc, const SolveResult& r, double h) {
  const double umax = r.velocity.size() ? r.velocity.cwiseAbs().maxCoeff() : 0.0;
  const double dmax = disc.mesh.num_cells() ? divergence_field(disc, r).cwiseAbs().maxCoeff() : 0.0;
  return umax > 0.0 ? dmax * h / umax : dmax;
}

/// Solve and measure one mesh.
inline StudyRow study_row(const PolygonalMesh& mesh, const ManufacturedCase& mc, SolveResult* out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  StudyRow row;
  const auto disc = discretize(mesh, mc.data.kappa_inv);
  auto sol = solve_problem(disc, mc.data);
  row.cells = mesh.num_cells();
  row.nodes = mesh.num_vertices();
  row.dofs = reported_dofs(disc);
  row.h = mesh_size(mesh);
  row.eta = estimate(disc, sol, mc.data).eta();
  row.div_max = scaled_divergence(disc, sol, row.h);
  if (mc.exact) {
    const auto e = compute_errors(disc, sol, *mc.exact);
    row.energy = e.energy;
    row.err_u = e.err_u;
    row.pressure = e.pressure;
    row.total = e.total;
    if (e.total > 0.0) row.eff = row.eta / e.total;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out) *out = std::move(sol);
  return row;
}

/// Uniform refinement study over `levels` meshes; rates are taken against h.
inline ConvergenceTable uniform_study(const ManufacturedCase& mc, const MeshSpec& spec, int n, int levels) {
  if (levels < 1) throw InputError("a study needs at least one level");
  ConvergenceTable t;
  t.case_name = mc.name;
  t.mesh = spec.name();
  t.nu = mc.data.nu;
  t.rhs = mc.data.rhs;
  for (int l = 0; l < levels; ++l) {
    auto row = study_row(study_mesh(spec, n, l, mc.domain), mc);
    row.level = l;
    if (l > 0) {
      const auto& p = t.rows.back();
      row.rate_energy = observed_rate(p.h, row.h, p.energy, row.energy);
      row.rate_pressure = observed_rate(p.h, row.h, p.pressure, row.pressure);
      row.rate_eta = observed_rate(p.h, row.h, p.eta, row.eta);
    }
    t.rows.push_back(row);
  }
  return t;
}

/// Adaptive run reported as a table; rates are slopes against DOFs, so the
/// optimal value is -1/2.
struct AdaptiveStudy {
  ConvergenceTable table;
  AdaptiveTrace trace;
  double slope_eta = kNaN;    // over the last three iterations
  double slope_total = kNaN;
};

inline AdaptiveStudy adaptive_study(const ManufacturedCase& mc, PolygonalMesh mesh0, const AdaptiveConfig& cfg,
                                    const std::string& mesh_name = "") {
  AdaptiveStudy s;
  s.trace = adaptive_loop(std::move(mesh0), mc.data, cfg, mc.exact);
  s.table.case_name = mc.name;
  s.table.mesh = mesh_name;
  s.table.nu = mc.data.nu;
  s.table.rhs = mc.data.rhs;
  for (const auto& r : s.trace.records) {
    StudyRow row;
    row.level = r.iteration;
    row.cells = r.cells;
    row.nodes = r.nodes;
    row.dofs = r.dofs;
    row.h = r.h;
    row.err_u = r.err_u;
    row.energy = r.err_u / mc.data.nu;
    row.pressure = r.err_p;
    row.total = r.total;
    row.eta = r.eta;
    row.eff = r.eff;
    row.div_max = kNaN;  // not tracked by the loop
    row.seconds = r.seconds;
    if (!s.table.rows.empty()) {
      const auto& p = s.table.rows.back();
      row.rate_energy = observed_rate(p.dofs, row.dofs, p.energy, row.energy);
      row.rate_pressure = observed_rate(p.dofs, row.dofs, p.pressure, row.pressure);
      row.rate_eta = observed_rate(p.dofs, row.dofs, p.eta, row.eta);
    }
    s.table.rows.push_back(row);
  }
  const auto& rows = s.table.rows;
  if (rows.size() >= 3) {
    std::vector<double> d, e, t;
    for (std::size_t i = rows.size() - 3; i < rows.size(); ++i) {
      d.push_back(rows[i].dofs);
      e.push_back(rows[i].eta);
      t.push_back(rows[i].total);
    }
    s.slope_eta = log_log_slope(d, e);
    s.slope_total = log_log_slope(d, t);
  }
  return s;
}

}  // namespace brinkvem
