// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/quadrature.hpp"
#include "brinkvem/vem_local.hpp"

namespace brinkvem {

/// Linear map from local velocity DOFs to the sub-edge fluxes of a conforming
/// lowest-order Raviart-Thomas field on the fan sub-triangulation.  Row s is
/// the flux through sub-edge s along its fixed normal.
struct RTReconstruction {
  Eigen::MatrixXd flux;
};

/// Signed outward flux of each side of triangle t.
inline Eigen::Vector3d triangle_fluxes(const SubTriangulation& st, const Eigen::Ref<const Eigen::VectorXd>& sub,
                                       int t) {
  Eigen::Vector3d out;
  for (int k = 0; k < 3; ++k) out[k] = st.sides[t][k].sign * sub[st.sides[t][k].subedge];
  return out;
}

/// Boundary fluxes come from the edge DOFs; interior fluxes equalize the
/// divergences of all sub-triangles.
inline RTReconstruction build_reconstruction(const ElementGeometry& g, const SubTriangulation& st) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  const int ns = st.num_subedges();
  const int nt = st.num_triangles();
  if (n < 3) throw MeshError("reconstruction needs at least three vertices");

  std::vector<int> interior;
  std::vector<int> slot(ns, -1);
  for (int s = 0; s < ns; ++s) {
    if (!st.subedges[s].is_boundary()) {
      slot[s] = static_cast<int>(interior.size());
      interior.push_back(s);
    }
  }
  const int ni = static_cast<int>(interior.size());

  RTReconstruction r;
  r.flux = Eigen::MatrixXd::Zero(ns, map.size());
  for (int s = 0; s < ns; ++s) {
    const auto& se = st.subedges[s];
    if (se.is_boundary()) r.flux(s, map.edge(se.polygon_edge)) = se.length;
  }
  if (ni == 0) return r;

  // Rows: (d_t - d_0) |T_t|-free form, t = 1..nt-1, as linear functions of the sub-edge fluxes.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(nt - 1, ni);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nt - 1, map.size());
  const auto add_divergence = [&](int row, int t, double w) {
    for (int k = 0; k < 3; ++k) {
      const auto& side = st.sides[t][k];
      const double c = w * side.sign / st.triangle_area[t];
      if (slot[side.subedge] >= 0) {
        lhs(row, slot[side.subedge]) += c;
      } else {
        rhs.row(row) -= c * r.flux.row(side.subedge);
      }
    }
  };
  for (int t = 1; t < nt; ++t) {
    add_divergence(t - 1, t, 1.0);
    add_divergence(t - 1, 0, -1.0);
  }
  Eigen::MatrixXd x;
  if (nt - 1 == ni) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible()) throw NumericalError("singular reconstruction system");
    x = lu.solve(rhs);
  } else {
    // Centroid fan: one more flux than conditions; take the minimum-norm solution.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(lhs);
    if (cod.rank() < nt - 1) throw NumericalError("rank-deficient reconstruction system");
    x = cod.solve(rhs);
  }
  for (int i = 0; i < ni; ++i) r.flux.row(interior[i]) = x.row(i);
  return r;
}

/// RT0 field of triangle t with the given outward side fluxes.
inline Vec2 rt0_eval_triangle(const SubTriangulation& st, const Eigen::Vector3d& side_flux, int t, Point2 x) {
  Vec2 v{};
  const double twice = 2.0 * st.triangle_area[t];
  for (int k = 0; k < 3; ++k) v += (side_flux[k] / twice) * (x - st.point(t, k));
  return v;
}

/// Index of a triangle containing x, or nullopt.
inline std::optional<int> locate_triangle(const SubTriangulation& st, Point2 x, double tol = 1e-12) {
  for (int t = 0; t < st.num_triangles(); ++t) {
    const Point2 a = st.point(t, 0), b = st.point(t, 1), c = st.point(t, 2);
    const double twice = 2.0 * st.triangle_area[t];
    const double l0 = orient2d(x, b, c) / twice;
    const double l1 = orient2d(a, x, c) / twice;
    const double l2 = orient2d(a, b, x) / twice;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol) return t;
  }
  return std::nullopt;
}

/// Value of the RT0 field with sub-edge fluxes `sub` at x.
inline Vec2 rt0_eval(const SubTriangulation& st, const Eigen::Ref<const Eigen::VectorXd>& sub, Point2 x) {
  const auto t = locate_triangle(st, x);
  if (!t) throw InputError("point outside element");
  return rt0_eval_triangle(st, triangle_fluxes(st, sub, *t), *t, x);
}

/// Local load vector (f, R_h phi_j) for every DOF j.
template <class F>
Eigen::VectorXd load_vector(const SubTriangulation& st, F&& f, const RTReconstruction& recon,
                            const QuadOptions& quad = {}) {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(st.num_subedges());
  for (int t = 0; t < st.num_triangles(); ++t) {
    const Point2 p0 = st.point(t, 0), p1 = st.point(t, 1), p2 = st.point(t, 2);
    const Eigen::Vector3d m = integrate_triangle(
        p0, p1, p2,
        [&](Point2 x) {
          const Vec2 fx = f(x);
          return Eigen::Vector3d(dot(fx, x - p0), dot(fx, x - p1), dot(fx, x - p2));
        },
        quad);
    for (int k = 0; k < 3; ++k) {
      const auto& side = st.sides[t][k];
      l[side.subedge] += side.sign * m[k] / (2.0 * st.triangle_area[t]);
    }
  }
  return recon.flux.transpose() * l;
}

/// Standard right-hand side (f, Pi0 phi_j).
template <class F>
Eigen::VectorXd projected_load_vector(const ProjectorPack& pk, F&& f, const QuadOptions& quad = {}) {
  const Eigen::Matrix<double, 6, 1> m = integrate_polygon(
      pk.subtri,
      [&](Point2 x) {
        const Vec2 fx = f(x);
        Eigen::Matrix<double, 6, 1> v;
        for (int k = 0; k < 6; ++k) v[k] = dot(fx, pk.basis.value(k, x));
        return v;
      },
      quad);
  return pk.pi_zero.transpose() * m;
}

struct ReconstructionReport {
  double max_flux_mismatch = 0.0;        // max_e |int_e R v.n - |e| dof_e|
  double divergence_mismatch = 0.0;      // |int_E div R v - int_E div v|
  double divergence_spread = 0.0;        // max - min of the sub-triangle divergences
  double divergence = 0.0;               // constant div R v
};

inline ReconstructionReport reconstruction_diagnostics(const ProjectorPack& pk, const RTReconstruction& recon,
                                                       const Eigen::Ref<const Eigen::VectorXd>& dofs) {
  const auto& st = pk.subtri;
  const auto& g = pk.geometry;
  const Eigen::VectorXd sub = recon.flux * dofs;
  ReconstructionReport rep;
  for (int s = 0; s < st.num_subedges(); ++s) {
    const auto& se = st.subedges[s];
    if (!se.is_boundary()) continue;
    const double expect = g.edge_length[se.polygon_edge] * dofs[LocalDofMap(g.num_vertices()).edge(se.polygon_edge)];
    rep.max_flux_mismatch = std::max(rep.max_flux_mismatch, std::abs(sub[s] - expect));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double total = 0.0;
  for (int t = 0; t < st.num_triangles(); ++t) {
    const double out = triangle_fluxes(st, sub, t).sum();
    total += out;
    lo = std::min(lo, out / st.triangle_area[t]);
    hi = std::max(hi, out / st.triangle_area[t]);
  }
  rep.divergence_mismatch = std::abs(total - g.area * pk.div_row.dot(dofs));
  rep.divergence_spread = hi - lo;
  rep.divergence = total / g.area;
  return rep;
}

}  // namespace brinkvem
