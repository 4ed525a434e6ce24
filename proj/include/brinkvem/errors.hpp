// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "brinkvem/assembly.hpp"
#include "brinkvem/cases.hpp"
#include "brinkvem/quadrature.hpp"

namespace brinkvem {

struct ErrorReport {
  double energy = 0.0;    // (sum |grad u - grad Pi_nabla u_h|^2 + |kinv^{1/2} (u - Pi0 u_h)|^2)^{1/2}
  double pressure = 0.0;  // ||p - p_h||
  double err_u = 0.0;     // nu * energy
  double total = 0.0;     // (err_u^2 + pressure^2)^{1/2}
};

/// Errors against an exact solution using the element projections of u_h.
inline ErrorReport compute_errors(const Discretization& disc, const SolveResult& r, const ExactSolution& ex,
                                  QuadOptions quad = QuadOptions{6}) {
  double e2 = 0.0, p2 = 0.0;
  for (int c = 0; c < disc.mesh.num_cells(); ++c) {
    const auto& el = disc.elements[c];
    const auto& pk = el.pack;
    const Eigen::VectorXd d = disc.local_dofs(c, r.velocity);
    const Mat2 gh = projection_gradient(pk, d);
    const Eigen::VectorXd c0 = pk.pi_zero * d;
    const double kinv = el.kappa_inv;
    const double pc = r.pressure[c];
    e2 += integrate_polygon(
        pk.subtri,
        [&](Point2 x) {
          const double g = (ex.grad_u(x) - gh).squaredNorm();
          if (kinv == 0.0) return g;
          const Vec2 du = ex.u(x) - pk.basis.evaluate(c0, x);
          return g + kinv * dot(du, du);
        },
        quad);
    p2 += integrate_polygon(
        pk.subtri,
        [&](Point2 x) {
          const double dp = ex.p(x) - pc;
          return dp * dp;
        },
        quad);
  }
  ErrorReport rep;
  rep.energy = std::sqrt(e2);
  rep.pressure = std::sqrt(p2);
  rep.err_u = r.nu * rep.energy;
  rep.total = std::hypot(rep.err_u, rep.pressure);
  return rep;
}

}  // namespace brinkvem
