// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "brinkvem/assembly.hpp"
#include "brinkvem/problem.hpp"
#include "brinkvem/quadrature.hpp"
#include "brinkvem/vem_local.hpp"

namespace brinkvem {

struct ElementEstimate {
  double eta_f_sq = 0.0;
  double eta_s_sq = 0.0;
  double eta_r_sq = 0.0;
  double eta_sq() const { return eta_f_sq + eta_s_sq + eta_r_sq; }
};

struct Estimate {
  std::vector<ElementEstimate> cells;
  double eta_f_sq = 0.0;
  double eta_s_sq = 0.0;
  double eta_r_sq = 0.0;

  double eta_sq() const { return eta_f_sq + eta_s_sq + eta_r_sq; }
  double eta() const { return std::sqrt(eta_sq()); }
  std::vector<double> cell_eta_sq() const {
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) v[i] = cells[i].eta_sq();
    return v;
  }
};

/// Traction jump on one interior edge, oriented along the global normal.
struct EdgeJump {
  int edge = -1;
  double length = 0.0;
  Vec2 jump;  // (nu G_left - p_left I) n - (nu G_right - p_right I) n
};

/// Jump of (nu grad Pi_nabla u_h - p_h I) n across one edge, given the two
/// side states.  Swapping the sides negates the result.
inline Vec2 traction_jump(double nu, const Mat2& g_left, double p_left, const Mat2& g_right, double p_right,
                          Vec2 n) {
  const Mat2 t = nu * (g_left - g_right);
  return apply(t, n) - (p_left - p_right) * n;
}

/// Per-cell constant gradients of Pi_nabla u_h.
inline std::vector<Mat2> projected_gradients(const Discretization& disc, const SolveResult& r) {
  std::vector<Mat2> g(disc.mesh.num_cells());
  for (int c = 0; c < disc.mesh.num_cells(); ++c) {
    g[c] = projection_gradient(disc.elements[c].pack, disc.local_dofs(c, r.velocity));
  }
  return g;
}

/// Jumps on all interior edges.  Hanging vertices are mesh vertices of both
/// neighbors, so every interior edge is already a common sub-edge.
inline std::vector<EdgeJump> edge_jumps(const Discretization& disc, const SolveResult& r, double nu) {
  const auto& m = disc.mesh;
  const auto grads = projected_gradients(disc, r);
  std::vector<EdgeJump> out;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    if (ed.is_boundary()) continue;
    EdgeJump j;
    j.edge = e;
    j.length = m.edge_length(e);
    j.jump = traction_jump(nu, grads[ed.left], r.pressure[ed.left], grads[ed.right], r.pressure[ed.right],
                           m.edge_normal(e));
    out.push_back(j);
  }
  return out;
}

/// Residual estimator: data term h^2 ||f||^2, stabilization term, and the
/// residual term with the reaction part and half of each interior-edge jump.
inline Estimate estimate(const Discretization& disc, const SolveResult& r, const ProblemData& data) {
  const auto& m = disc.mesh;
  const double nu = data.nu;
  const double nu2 = nu * nu;
  Estimate est;
  est.cells.resize(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto& el = disc.elements[c];
    const auto& pk = el.pack;
    const double h = pk.geometry.diameter;
    auto& ce = est.cells[c];
    const double f2 = integrate_polygon(
        pk.subtri,
        [&](Point2 x) {
          const Vec2 f = data.f(x);
          return dot(f, f);
        },
        data.quad);
    ce.eta_f_sq = h * h * f2;
    const Eigen::VectorXd d = disc.local_dofs(c, r.velocity);
    const Eigen::VectorXd dn = d - pk.dof_of_p1 * (pk.pi_nabla * d);
    const Eigen::VectorXd d0 = d - pk.dof_of_p1 * (pk.pi_zero * d);
    ce.eta_s_sq = nu2 * (dn.dot(el.forms.s_nabla * dn) + d0.dot(el.forms.s_zero * d0));
    const Eigen::VectorXd c0 = pk.pi_zero * d;
    const double k = el.kappa_inv;
    ce.eta_r_sq = nu2 * h * h * k * k * std::max(0.0, c0.dot(pk.mass_gram * c0));
  }
  for (const auto& j : edge_jumps(disc, r, nu)) {
    const auto& ed = m.edges()[j.edge];
    const double w = 0.5 * j.length * j.length * dot(j.jump, j.jump);
    est.cells[ed.left].eta_r_sq += w;
    est.cells[ed.right].eta_r_sq += w;
  }
  for (const auto& ce : est.cells) {
    est.eta_f_sq += ce.eta_f_sq;
    est.eta_s_sq += ce.eta_s_sq;
    est.eta_r_sq += ce.eta_r_sq;
  }
  return est;
}

/// Smallest set of cells, largest indicators first (ties by index), whose
/// indicators sum to at least delta times the total.
inline std::vector<int> dorfler_mark(const std::vector<double>& eta_sq, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("marking parameter must lie in (0, 1)");
  for (double v : eta_sq) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("indicators must be finite and non-negative");
  }
  std::vector<int> order(eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta_sq[a] > eta_sq[b]; });
  long double total = 0.0L;
  for (int i : order) total += eta_sq[i];
  std::vector<int> marked;
  if (total == 0.0L) return marked;
  const long double target = static_cast<long double>(delta) * total;
  long double sum = 0.0L, before_last = 0.0L;
  for (int i : order) {
    if (sum >= target) break;
    marked.push_back(i);
    before_last = sum;
    sum += eta_sq[i];
  }
  // Minimality: without the last marked cell the bulk criterion fails.
  if (sum < target || before_last >= target) {
    throw NumericalError("Dorfler marking is not minimal");
  }
  return marked;
}

}  // namespace brinkvem
