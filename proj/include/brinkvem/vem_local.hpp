// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/quadrature.hpp"

namespace brinkvem {

/// Local DOF layout of the lowest-order divergence-free space: (v_x, v_y)
/// at vertex i in slots 2i, 2i+1, the mean outward normal flux of edge i in
/// slot 2N+i.
struct LocalDofMap {
  int num_vertices = 0;

  explicit LocalDofMap(int n) : num_vertices(n) {}
  int size() const { return 3 * num_vertices; }
  int vx(int i) const { return 2 * i; }
  int vy(int i) const { return 2 * i + 1; }
  int edge(int i) const { return 2 * num_vertices + i; }
  bool is_edge(int j) const { return j >= 2 * num_vertices; }
};

/// Trace of a local function on one edge, parametrized by t in [0, 1] from
/// vertex i to vertex i+1.  The normal part is the quadratic with the given
/// endpoint values and mean; the tangential part is linear.
struct EdgeTrace {
  Vec2 normal;
  Vec2 tangent;
  double length = 0.0;
  double normal_start = 0.0;
  double normal_end = 0.0;
  double normal_mean = 0.0;
  double tangential_start = 0.0;
  double tangential_end = 0.0;

  double normal_at(double t) const {
    const double a = normal_start, b = normal_end;
    return a * (1.0 - t) + b * t + (normal_mean - 0.5 * (a + b)) * 6.0 * t * (1.0 - t);
  }
  double tangential_at(double t) const { return tangential_start * (1.0 - t) + tangential_end * t; }
  Vec2 value(double t) const { return normal_at(t) * normal + tangential_at(t) * tangent; }
  /// Exact integral of the trace over the edge.
  Vec2 integral() const {
    return length * (normal_mean * normal + 0.5 * (tangential_start + tangential_end) * tangent);
  }
};

inline EdgeTrace edge_trace(const Eigen::Ref<const Eigen::VectorXd>& dofs, const ElementGeometry& g,
                            int edge) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  const int i0 = edge;
  const int i1 = (edge + 1) % n;
  const Vec2 va{dofs[map.vx(i0)], dofs[map.vy(i0)]};
  const Vec2 vb{dofs[map.vx(i1)], dofs[map.vy(i1)]};
  EdgeTrace tr;
  tr.normal = g.normal[edge];
  tr.tangent = g.tangent[edge];
  tr.length = g.edge_length[edge];
  tr.normal_start = dot(va, tr.normal);
  tr.normal_end = dot(vb, tr.normal);
  tr.normal_mean = dofs[map.edge(edge)];
  tr.tangential_start = dot(va, tr.tangent);
  tr.tangential_end = dot(vb, tr.tangent);
  return tr;
}

/// Vector linear polynomials in scaled coordinates xi = (x - x_E)/h_E,
/// eta = (y - y_E)/h_E.  Member k has component k/3 and scalar factor
/// {1, xi, eta}[k % 3].
struct VectorP1Basis {
  Point2 center;
  double scale = 1.0;

  static constexpr int size() { return 6; }
  static int component(int k) { return k / 3; }
  static int monomial(int k) { return k % 3; }

  double scalar(int m, Point2 p) const {
    if (m == 0) return 1.0;
    return m == 1 ? (p.x - center.x) / scale : (p.y - center.y) / scale;
  }
  Vec2 value(int k, Point2 p) const {
    const double s = scalar(monomial(k), p);
    return component(k) == 0 ? Vec2{s, 0.0} : Vec2{0.0, s};
  }
  /// Constant gradient matrix (row = component).
  Mat2 gradient(int k) const {
    Mat2 gm = Mat2::Zero();
    const int m = monomial(k);
    if (m > 0) gm(component(k), m - 1) = 1.0 / scale;
    return gm;
  }

  Vec2 evaluate(const Eigen::Ref<const Eigen::VectorXd>& c, Point2 p) const {
    const double xi = (p.x - center.x) / scale;
    const double eta = (p.y - center.y) / scale;
    return {c[0] + c[1] * xi + c[2] * eta, c[3] + c[4] * xi + c[5] * eta};
  }
  Mat2 gradient(const Eigen::Ref<const Eigen::VectorXd>& c) const {
    Mat2 gm;
    gm << c[1], c[2], c[4], c[5];
    return gm / scale;
  }
};

inline VectorP1Basis p1_basis(const ElementGeometry& g) { return {g.centroid, g.diameter}; }

/// Per-element projector matrices and the P1 data needed by the local forms.
struct ProjectorPack {
  ElementGeometry geometry;
  SubTriangulation subtri;
  VectorP1Basis basis;
  Eigen::MatrixXd pi_nabla;  // 6 x Ndof
  Eigen::MatrixXd pi_zero;   // 6 x Ndof
  Eigen::RowVectorXd div_row;
  Eigen::RowVectorXd vertex_average_x;  // P^0 x-component functional
  Eigen::MatrixXd dof_of_p1;            // Ndof x 6: DOFs of each basis member
  Eigen::Matrix<double, 6, 6> grad_gram;
  Eigen::Matrix<double, 6, 6> mass_gram;
  double gram_condition = 1.0;

  int num_dofs() const { return static_cast<int>(div_row.size()); }
};

/// DOF vector of the P1 member `k` (vertex values, edge midpoint normal values).
inline Eigen::MatrixXd p1_dof_matrix(const ElementGeometry& g, const VectorP1Basis& b) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(map.size(), 6);
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < n; ++i) {
      const Vec2 v = b.value(k, g.vertex(i));
      d(map.vx(i), k) = v.x;
      d(map.vy(i), k) = v.y;
      const Point2 mid = 0.5 * (g.vertex(i) + g.vertex(i + 1));
      d(map.edge(i), k) = dot(b.value(k, mid), g.normal[i]);
    }
  }
  return d;
}

inline Eigen::Matrix<double, 6, 6> p1_gradient_gram(const ElementGeometry& g, const VectorP1Basis& b) {
  Eigen::Matrix<double, 6, 6> k;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) k(r, c) = g.area * (b.gradient(r).cwiseProduct(b.gradient(c))).sum();
  }
  return k;
}

inline Eigen::Matrix<double, 6, 6> p1_mass_gram(const SubTriangulation& st, const VectorP1Basis& b) {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  for (int r = 0; r < 6; ++r) {
    for (int c = r; c < 6; ++c) {
      if (VectorP1Basis::component(r) != VectorP1Basis::component(c)) continue;
      const int mr = VectorP1Basis::monomial(r), mc = VectorP1Basis::monomial(c);
      m(r, c) = integrate_polygon(
          st, [&](Point2 p) { return b.scalar(mr, p) * b.scalar(mc, p); }, 2);
      m(c, r) = m(r, c);
    }
  }
  return m;
}

/// Constant divergence from the edge fluxes: |e_j| / |E| on edge slots.
inline Eigen::RowVectorXd divergence_row(const ElementGeometry& g) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(map.size());
  for (int i = 0; i < n; ++i) row[map.edge(i)] = g.edge_length[i] / g.area;
  return row;
}

struct PiNablaResult {
  Eigen::MatrixXd matrix;
  double condition = 1.0;
};

/// Energy projection; constant modes fixed by the vertex average.
inline PiNablaResult compute_pi_nabla(const ElementGeometry& g, const VectorP1Basis& b) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  Eigen::Matrix<double, 6, 6> gram = p1_gradient_gram(g, b);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(6, map.size());
  for (const int k : {0, 3}) {
    const int comp = VectorP1Basis::component(k);
    for (int c = 0; c < 6; ++c) {
      double avg = 0.0;
      for (int i = 0; i < n; ++i) {
        const Vec2 v = b.value(c, g.vertex(i));
        avg += comp == 0 ? v.x : v.y;
      }
      gram(k, c) = avg / n;
    }
    for (int i = 0; i < n; ++i) rhs(k, comp == 0 ? map.vx(i) : map.vy(i)) = 1.0 / n;
  }
  // Boundary form of (grad v, grad p): sum_e (grad p n_e) . int_e v.
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(map.size());
  for (int j = 0; j < map.size(); ++j) {
    unit.setZero();
    unit[j] = 1.0;
    for (int e = 0; e < n; ++e) {
      const EdgeTrace tr = edge_trace(unit, g, e);
      if (tr.normal_start == 0.0 && tr.normal_end == 0.0 && tr.normal_mean == 0.0 &&
          tr.tangential_start == 0.0 && tr.tangential_end == 0.0) {
        continue;
      }
      const Vec2 iv = tr.integral();
      for (int k = 0; k < 6; ++k) {
        if (VectorP1Basis::monomial(k) == 0) continue;
        const Vec2 w = apply(b.gradient(k), g.normal[e]);
        rhs(k, j) += dot(w, iv);
      }
    }
  }
  Eigen::PartialPivLU<Eigen::Matrix<double, 6, 6>> lu(gram);
  PiNablaResult out;
  out.matrix = lu.solve(rhs);
  out.condition = 1.0 / lu.rcond();
  return out;
}

namespace detail {

/// Coefficients (s over {xi, eta, xi^2, xi eta, eta^2}, then c) of the
/// decomposition p_k = grad s + c (eta, -xi), one column per member k.
inline Eigen::Matrix<double, 6, 6> helmholtz_p1_split(double h) {
  Eigen::Matrix<double, 6, 6> cols = Eigen::Matrix<double, 6, 6>::Zero();
  // Columns: grad xi, grad eta, grad xi^2, grad xi eta, grad eta^2, (eta, -xi)
  cols(0, 0) = 1.0 / h;
  cols(3, 1) = 1.0 / h;
  cols(1, 2) = 2.0 / h;
  cols(2, 3) = 1.0 / h;
  cols(4, 3) = 1.0 / h;
  cols(5, 4) = 2.0 / h;
  cols(2, 5) = 1.0;
  cols(4, 5) = -1.0;
  return cols.fullPivLu().inverse();
}

inline double split_scalar(const Eigen::Matrix<double, 6, 1>& coef, const VectorP1Basis& b, Point2 p) {
  const double xi = b.scalar(1, p), eta = b.scalar(2, p);
  return coef[0] * xi + coef[1] * eta + coef[2] * xi * xi + coef[3] * xi * eta + coef[4] * eta * eta;
}

}  // namespace detail

/// L2 projection assembled from -(div v, s) + (v.n, s)_dE + (Pi_nabla v, g).
inline Eigen::MatrixXd compute_pi_zero(const ElementGeometry& g, const SubTriangulation& st,
                                       const VectorP1Basis& b, const Eigen::MatrixXd& pi_nabla,
                                       const Eigen::RowVectorXd& div_row,
                                       const Eigen::Matrix<double, 6, 6>& mass) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  const Eigen::Matrix<double, 6, 6> split = detail::helmholtz_p1_split(b.scale);
  const auto& gl = edge_gauss(3);

  // (p_l, g) for the rotation field g = (eta, -xi).
  Eigen::Matrix<double, 6, 1> p_dot_g;
  for (int l = 0; l < 6; ++l) {
    p_dot_g[l] = integrate_polygon(
        st,
        [&](Point2 p) { return dot(b.value(l, p), Vec2{b.scalar(2, p), -b.scalar(1, p)}); }, 2);
  }

  Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(6, map.size());
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(map.size());
  for (int k = 0; k < 6; ++k) {
    const Eigen::Matrix<double, 6, 1> coef = split.col(k);
    const double int_s = integrate_polygon(
        st, [&](Point2 p) { return detail::split_scalar(coef, b, p); }, 2);
    for (int j = 0; j < map.size(); ++j) {
      double r = -div_row[j] * int_s;
      unit.setZero();
      unit[j] = 1.0;
      for (int e = 0; e < n; ++e) {
        const EdgeTrace tr = edge_trace(unit, g, e);
        if (tr.normal_start == 0.0 && tr.normal_end == 0.0 && tr.normal_mean == 0.0) continue;
        const Point2 a = g.vertex(e), c = g.vertex(e + 1);
        for (std::size_t q = 0; q < gl.points.size(); ++q) {
          const double t = gl.points[q];
          r += gl.weights[q] * tr.length * tr.normal_at(t) * detail::split_scalar(coef, b, a + t * (c - a));
        }
      }
      r += coef[5] * p_dot_g.dot(pi_nabla.col(j));
      moments(k, j) = r;
    }
  }
  return mass.ldlt().solve(moments);
}

inline ProjectorPack compute_projectors(ElementGeometry g, SubTriangulation st) {
  ProjectorPack pk;
  pk.basis = p1_basis(g);
  pk.div_row = divergence_row(g);
  auto pn = compute_pi_nabla(g, pk.basis);
  pk.pi_nabla = std::move(pn.matrix);
  pk.gram_condition = pn.condition;
  pk.grad_gram = p1_gradient_gram(g, pk.basis);
  pk.mass_gram = p1_mass_gram(st, pk.basis);
  pk.pi_zero = compute_pi_zero(g, st, pk.basis, pk.pi_nabla, pk.div_row, pk.mass_gram);
  pk.dof_of_p1 = p1_dof_matrix(g, pk.basis);
  const int n = g.num_vertices();
  pk.vertex_average_x = Eigen::RowVectorXd::Zero(3 * n);
  for (int i = 0; i < n; ++i) pk.vertex_average_x[2 * i] = 1.0 / n;
  pk.geometry = std::move(g);
  pk.subtri = std::move(st);
  return pk;
}

inline ProjectorPack compute_projectors(const PolygonalMesh& mesh, int cell) {
  auto g = element_geometry(mesh, cell);
  auto st = fan_triangulate(g);
  return compute_projectors(std::move(g), std::move(st));
}

struct StabilizationMatrices {
  Eigen::MatrixXd s_nabla;  // dofi-dofi
  Eigen::MatrixXd s_zero;   // |E| kappa^{-1} dofi-dofi
};

/// Stabilizations as DOF-space matrices; `kappa_inv` is the element value of
/// the inverse permeability (zero gives the Stokes limit).
inline StabilizationMatrices stabilization_matrices(const ProjectorPack& pk, double kappa_inv) {
  if (!(kappa_inv >= 0.0) || !std::isfinite(kappa_inv)) {
    throw InputError("inverse permeability must be finite and non-negative");
  }
  const int nd = pk.num_dofs();
  StabilizationMatrices s;
  s.s_nabla = Eigen::MatrixXd::Identity(nd, nd);
  s.s_zero = (pk.geometry.area * kappa_inv) * Eigen::MatrixXd::Identity(nd, nd);
  return s;
}

/// Local matrices of a_h^E (without nu) and of b(., q) against the element
/// constant q = 1.
struct LocalForms {
  Eigen::MatrixXd a;
  Eigen::RowVectorXd b;
  Eigen::MatrixXd s_nabla;
  Eigen::MatrixXd s_zero;
};

inline LocalForms local_forms(const ProjectorPack& pk, double kappa_inv) {
  const int nd = pk.num_dofs();
  const auto stab = stabilization_matrices(pk, kappa_inv);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(nd, nd);
  const Eigen::MatrixXd rn = eye - pk.dof_of_p1 * pk.pi_nabla;
  LocalForms f;
  f.a = pk.pi_nabla.transpose() * pk.grad_gram * pk.pi_nabla + rn.transpose() * stab.s_nabla * rn;
  if (kappa_inv > 0.0) {
    const Eigen::MatrixXd r0 = eye - pk.dof_of_p1 * pk.pi_zero;
    f.a += kappa_inv * (pk.pi_zero.transpose() * pk.mass_gram * pk.pi_zero) +
           r0.transpose() * stab.s_zero * r0;
  }
  f.a = 0.5 * (f.a + f.a.transpose()).eval();
  f.b = pk.geometry.area * pk.div_row;
  f.s_nabla = stab.s_nabla;
  f.s_zero = stab.s_zero;
  return f;
}

/// DOFs of an analytic field: vertex values and Gauss normal means.
template <class F>
Eigen::VectorXd dof_interpolate(F&& u, const ElementGeometry& g) {
  const int n = g.num_vertices();
  const LocalDofMap map(n);
  Eigen::VectorXd d(map.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 v = u(g.vertex(i));
    d[map.vx(i)] = v.x;
    d[map.vy(i)] = v.y;
    const Vec2 nn = g.normal[i];
    d[map.edge(i)] =
        integrate_segment(g.vertex(i), g.vertex(i + 1), [&](Point2 p) { return dot(u(p), nn); }) /
        g.edge_length[i];
  }
  return d;
}

enum class Projection { nabla, zero };

inline Eigen::VectorXd projection_coefficients(const ProjectorPack& pk,
                                               const Eigen::Ref<const Eigen::VectorXd>& dofs,
                                               Projection which) {
  return which == Projection::nabla ? Eigen::VectorXd(pk.pi_nabla * dofs)
                                    : Eigen::VectorXd(pk.pi_zero * dofs);
}

inline std::vector<Vec2> evaluate_projection(const ProjectorPack& pk,
                                             const Eigen::Ref<const Eigen::VectorXd>& dofs,
                                             Projection which, const std::vector<Point2>& points) {
  const Eigen::VectorXd c = projection_coefficients(pk, dofs, which);
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pk.basis.evaluate(c, p));
  return out;
}

/// Constant gradient of the projected field.
inline Mat2 projection_gradient(const ProjectorPack& pk, const Eigen::Ref<const Eigen::VectorXd>& dofs,
                                Projection which = Projection::nabla) {
  return pk.basis.gradient(projection_coefficients(pk, dofs, which));
}

}  // namespace brinkvem
