// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "brinkvem/assembly.hpp"
#include "brinkvem/cases.hpp"
#include "brinkvem/errors.hpp"
#include "brinkvem/estimator.hpp"
#include "brinkvem/refine.hpp"

namespace brinkvem {

struct AdaptiveConfig {
  double delta = 0.4;
  int max_iterations = 20;
  double node_tolerance = 1e4;  // stop once the mesh has this many vertices

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("marking parameter must lie in (0, 1)");
    if (max_iterations < 1) throw InputError("need at least one adaptive iteration");
    if (!(node_tolerance > 0.0)) throw InputError("node tolerance must be positive");
  }
};

/// Unknowns reported against the estimator: free and fixed velocity DOFs
/// plus one pressure per cell.
inline int reported_dofs(const Discretization& disc) {
  return disc.dofs.num_velocity() + disc.dofs.num_pressure();
}

struct AdaptiveRecord {
  int iteration = 0;
  int dofs = 0;
  int nodes = 0;
  int cells = 0;
  double h = 0.0;
  double eta = 0.0;
  double eta_f = 0.0;
  double eta_s = 0.0;
  double eta_r = 0.0;
  double err_u = std::numeric_limits<double>::quiet_NaN();    // nu * energy error
  double err_p = std::numeric_limits<double>::quiet_NaN();
  double total = std::numeric_limits<double>::quiet_NaN();    // (err_u^2 + err_p^2)^{1/2}
  double eff = std::numeric_limits<double>::quiet_NaN();
  int marked = 0;
  double seconds = 0.0;
};

struct AdaptiveTrace {
  std::vector<AdaptiveRecord> records;
  std::vector<Point2> last_marked_centroids;  // cells marked in the final iteration
  PolygonalMesh final_mesh;
  std::optional<SolveResult> final_solution;
  std::string failure;  // non-empty when the loop stopped on an error
};

/// Eff = eta / (err_u^2 + err_p^2)^{1/2}.
inline double effectivity(double eta, double err_u, double err_p) {
  const double den = std::hypot(err_u, err_p);
  if (!(den > 0.0)) throw NumericalError("effectivity index needs a nonzero error");
  return eta / den;
}

/// Solve, estimate, mark, refine until `max_iterations` solves were done or
/// the mesh has at least `node_tolerance` vertices.  Marks of the final iteration are
/// recorded but not applied.
inline AdaptiveTrace adaptive_loop(PolygonalMesh mesh, const ProblemData& data, const AdaptiveConfig& cfg,
                                   const std::optional<ExactSolution>& exact = std::nullopt) {
  cfg.validate();
  data.validate();
  AdaptiveTrace trace;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    AdaptiveRecord rec;
    rec.iteration = it;
    std::vector<int> marked;
    try {
      const auto disc = discretize(mesh, data.kappa_inv);
      auto sol = solve_problem(disc, data);
      const auto est = estimate(disc, sol, data);
      rec.dofs = reported_dofs(disc);
      rec.nodes = mesh.num_vertices();
      rec.cells = mesh.num_cells();
      rec.h = mesh_size(mesh);
      rec.eta = est.eta();
      rec.eta_f = std::sqrt(est.eta_f_sq);
      rec.eta_s = std::sqrt(est.eta_s_sq);
      rec.eta_r = std::sqrt(est.eta_r_sq);
      if (exact) {
        const auto e = compute_errors(disc, sol, *exact);
        rec.err_u = e.err_u;
        rec.err_p = e.pressure;
        rec.total = e.total;
        if (e.total > 0.0) rec.eff = effectivity(rec.eta, e.err_u, e.pressure);
      }
      if (est.eta_sq() > 0.0) marked = dorfler_mark(est.cell_eta_sq(), cfg.delta);
      rec.marked = static_cast<int>(marked.size());
      trace.last_marked_centroids.clear();
      for (int c : marked) trace.last_marked_centroids.push_back(disc.elements[c].pack.geometry.centroid);
      trace.final_solution = std::move(sol);
      trace.final_mesh = mesh;
    } catch (const Error& e) {
      trace.failure = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    const bool last = it + 1 == cfg.max_iterations || rec.nodes >= cfg.node_tolerance || marked.empty();
    if (!last) {
      try {
        mesh = refine_cells(mesh, marked);
      } catch (const Error& e) {
        trace.failure = "refinement after iteration " + std::to_string(it) + ": " + e.what();
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        trace.records.push_back(rec);
        break;
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.records.push_back(rec);
    if (last) break;
  }
  return trace;
}

}  // namespace brinkvem
