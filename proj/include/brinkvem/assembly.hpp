// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/problem.hpp"
#include "brinkvem/rt_reconstruction.hpp"
#include "brinkvem/vem_local.hpp"

namespace brinkvem {

/// Global numbering: (u_x, u_y) per vertex, one normal flux per edge along
/// its global normal, one pressure per cell, one mean-value multiplier.
class GlobalDofMap {
 public:
  GlobalDofMap() = default;
  explicit GlobalDofMap(const PolygonalMesh& m)
      : nv_(m.num_vertices()), ne_(m.num_edges()), nc_(m.num_cells()) {}

  int num_velocity() const { return 2 * nv_ + ne_; }
  int num_pressure() const { return nc_; }
  int size() const { return num_velocity() + nc_ + 1; }

  int vertex(int v, int comp) const { return 2 * v + comp; }
  int edge(int e) const { return 2 * nv_ + e; }
  int pressure(int c) const { return num_velocity() + c; }
  int multiplier() const { return num_velocity() + nc_; }

  /// Global index and sign of every local DOF of `cell`.
  void local_to_global(const PolygonalMesh& m, int cell, std::vector<int>& idx, std::vector<int>& sign) const {
    const auto cv = m.cell(cell);
    const int n = static_cast<int>(cv.size());
    idx.resize(3 * n);
    sign.assign(3 * n, 1);
    const auto ce = m.cell_edges(cell);
    for (int i = 0; i < n; ++i) {
      idx[2 * i] = vertex(cv[i], 0);
      idx[2 * i + 1] = vertex(cv[i], 1);
      idx[2 * n + i] = edge(ce[i].edge);
      sign[2 * n + i] = ce[i].sign;
    }
  }

 private:
  int nv_ = 0, ne_ = 0, nc_ = 0;
};

struct ElementData {
  ProjectorPack pack;
  RTReconstruction recon;
  LocalForms forms;
  double kappa_inv = 0.0;
  std::vector<int> global;
  std::vector<int> sign;
};

/// Mesh plus every per-element operator; independent of nu, f and g.
struct Discretization {
  PolygonalMesh mesh;
  GlobalDofMap dofs;
  std::vector<ElementData> elements;
  double domain_area = 0.0;

  Eigen::VectorXd local_dofs(int cell, const Eigen::Ref<const Eigen::VectorXd>& velocity) const {
    const auto& el = elements[cell];
    Eigen::VectorXd d(el.global.size());
    for (std::size_t i = 0; i < el.global.size(); ++i) d[i] = el.sign[i] * velocity[el.global[i]];
    return d;
  }
};

inline Discretization discretize(PolygonalMesh mesh, const InversePermeability& kappa_inv) {
  Discretization disc;
  disc.dofs = GlobalDofMap(mesh);
  disc.elements.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto& el = disc.elements[c];
    try {
      auto g = element_geometry(mesh, c);
      auto st = fan_triangulate(g);
      el.recon = build_reconstruction(g, st);
      el.pack = compute_projectors(std::move(g), std::move(st));
      el.kappa_inv = kappa_inv.at(c, el.pack.geometry.centroid);
      el.forms = local_forms(el.pack, el.kappa_inv);
    } catch (const Error& e) {
      throw NumericalError("element " + std::to_string(c) + ": " + e.what());
    }
    disc.dofs.local_to_global(mesh, c, el.global, el.sign);
    disc.domain_area += el.pack.geometry.area;
  }
  disc.mesh = std::move(mesh);
  return disc;
}

/// Full saddle-point system before boundary elimination.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  double nu = 1.0;
};

namespace detail {

template <class F>
Eigen::VectorXd element_load(const ElementData& el, F&& f, RhsMode mode, const QuadOptions& quad) {
  return mode == RhsMode::robust ? load_vector(el.pack.subtri, f, el.recon, quad)
                                 : projected_load_vector(el.pack, f, quad);
}

}  // namespace detail

/// [[nu A, B^T, 0], [B, 0, m], [0, m^T, 0]] with m_E = |E|, and the load vector.
inline SparseSystem assemble(const Discretization& disc, const ProblemData& data) {
  data.validate();
  const auto& map = disc.dofs;
  std::vector<Eigen::Triplet<double>> trip;
  SparseSystem sys;
  sys.nu = data.nu;
  sys.rhs = Eigen::VectorXd::Zero(map.size());
  for (int c = 0; c < disc.mesh.num_cells(); ++c) {
    const auto& el = disc.elements[c];
    const int nd = static_cast<int>(el.global.size());
    const int pc = map.pressure(c);
    const Eigen::VectorXd load = detail::element_load(el, data.f, data.rhs, data.quad);
    for (int i = 0; i < nd; ++i) {
      const int gi = el.global[i];
      const double si = el.sign[i];
      for (int j = 0; j < nd; ++j) {
        const double v = el.forms.a(i, j);
        if (v != 0.0) trip.emplace_back(gi, el.global[j], data.nu * si * el.sign[j] * v);
      }
      const double b = el.forms.b[i];
      if (b != 0.0) {
        trip.emplace_back(pc, gi, si * b);
        trip.emplace_back(gi, pc, si * b);
      }
      sys.rhs[gi] += si * load[i];
    }
    trip.emplace_back(pc, map.multiplier(), el.pack.geometry.area);
    trip.emplace_back(map.multiplier(), pc, el.pack.geometry.area);
  }
  sys.matrix.resize(map.size(), map.size());
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

/// Prescribed boundary DOF values and their positions.
struct DirichletData {
  std::vector<char> is_fixed;     // per global DOF
  Eigen::VectorXd values;         // size = velocity DOFs; zero on free DOFs
  double raw_net_flux = 0.0;      // composite-Gauss net outward flux of g
  double flux_correction = 0.0;   // constant subtracted from each outward edge mean
};

inline DirichletData dirichlet_data(const Discretization& disc, const VectorField& g) {
  const auto& m = disc.mesh;
  const auto& map = disc.dofs;
  DirichletData dd;
  dd.is_fixed.assign(map.size(), 0);
  dd.values = Eigen::VectorXd::Zero(map.num_velocity());
  const auto& gl = edge_gauss(3);
  double perimeter = 0.0, gmax = 0.0, net = 0.0, discrete_net = 0.0;
  std::vector<int> boundary_edges;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    if (!ed.is_boundary()) continue;
    boundary_edges.push_back(e);
    const Point2 a = m.vertex(ed.v0), b = m.vertex(ed.v1);
    const Vec2 n = m.edge_normal(e);
    const double out = ed.left >= 0 ? 1.0 : -1.0;
    const double len = m.edge_length(e);
    perimeter += len;
    const double mean = integrate_segment(a, b, [&](Point2 p) { return dot(g(p), n); }) / len;
    dd.values[map.edge(e)] = mean;
    dd.is_fixed[map.edge(e)] = 1;
    discrete_net += out * len * mean;
    constexpr int kSub = 64;
    for (int s = 0; s < kSub; ++s) {
      const Point2 p = a + (static_cast<double>(s) / kSub) * (b - a);
      const Point2 q = a + (static_cast<double>(s + 1) / kSub) * (b - a);
      net += out * integrate_segment(p, q, [&](Point2 x) {
        const Vec2 gx = g(x);
        gmax = std::max(gmax, std::max(std::abs(gx.x), std::abs(gx.y)));
        return dot(gx, n);
      });
    }
    for (double t : gl.points) {
      const Vec2 gx = g(a + t * (b - a));
      gmax = std::max(gmax, std::max(std::abs(gx.x), std::abs(gx.y)));
    }
  }
  dd.raw_net_flux = net;
  if (std::abs(net) > 1e-8 * perimeter * std::max(gmax, 1e-300) && std::abs(net) > 0.0) {
    throw InputError("boundary data is incompatible with incompressibility: net flux " + std::to_string(net));
  }
  // Make the discrete net flux exactly zero so the divergence constraint is solvable.
  dd.flux_correction = discrete_net / perimeter;
  for (int e : boundary_edges) {
    const double out = m.edges()[e].left >= 0 ? 1.0 : -1.0;
    dd.values[map.edge(e)] -= out * dd.flux_correction;
  }
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (!m.is_boundary_vertex(v)) continue;
    const Vec2 gv = g(m.vertex(v));
    dd.values[map.vertex(v, 0)] = gv.x;
    dd.values[map.vertex(v, 1)] = gv.y;
    dd.is_fixed[map.vertex(v, 0)] = 1;
    dd.is_fixed[map.vertex(v, 1)] = 1;
  }
  return dd;
}

/// System on the free DOFs after lifting the boundary values.
struct ReducedSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<int> free_to_full;
  DirichletData dirichlet;
  double nu = 1.0;
  int num_free_velocity = 0;
};

inline ReducedSystem apply_dirichlet(const SparseSystem& sys, const Discretization& disc, const VectorField& g) {
  ReducedSystem red;
  red.nu = sys.nu;
  red.dirichlet = dirichlet_data(disc, g);
  const auto& fixed = red.dirichlet.is_fixed;
  const int n = static_cast<int>(fixed.size());
  std::vector<int> full_to_free(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) {
      full_to_free[i] = static_cast<int>(red.free_to_full.size());
      red.free_to_full.push_back(i);
      if (i < disc.dofs.num_velocity()) ++red.num_free_velocity;
    }
  }
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(n);
  lift.head(disc.dofs.num_velocity()) = red.dirichlet.values;
  const Eigen::VectorXd full_rhs = sys.rhs - sys.matrix * lift;
  const int nf = static_cast<int>(red.free_to_full.size());
  red.rhs.resize(nf);
  for (int i = 0; i < nf; ++i) red.rhs[i] = full_rhs[red.free_to_full[i]];
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.matrix.nonZeros());
  for (int col = 0; col < sys.matrix.outerSize(); ++col) {
    if (full_to_free[col] < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, col); it; ++it) {
      const int r = full_to_free[it.row()];
      if (r >= 0) trip.emplace_back(r, full_to_free[col], it.value());
    }
  }
  red.matrix.resize(nf, nf);
  red.matrix.setFromTriplets(trip.begin(), trip.end());
  return red;
}

struct SolveResult {
  Eigen::VectorXd velocity;  // all velocity DOFs, boundary values included
  Eigen::VectorXd pressure;  // one value per cell, zero mean
  double multiplier = 0.0;
  double residual = 0.0;     // relative residual of the reduced system
  double nu = 1.0;
};

namespace detail {

/// b - K v accumulated in long double.
inline Eigen::VectorXd extended_residual(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& v) {
  std::vector<long double> acc(b.data(), b.data() + b.size());
  for (int j = 0; j < k.outerSize(); ++j) {
    const long double vj = v[j];
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, j); it; ++it) acc[it.row()] -= it.value() * vj;
  }
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = static_cast<double>(acc[i]);
  return r;
}

/// Iterative refinement of K y = b with an approximate inverse `apply`.
/// Returns the final residual norm.
template <class Apply>
double refine(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& b, Eigen::VectorXd& y, Apply&& apply,
              int max_steps) {
  Eigen::VectorXd r = extended_residual(k, b, y);
  double res = r.norm();
  for (int it = 0; it < max_steps; ++it) {
    const Eigen::VectorXd dy = apply(r);
    if (!dy.allFinite()) break;
    const Eigen::VectorXd y_new = y + dy;
    const Eigen::VectorXd r_new = extended_residual(k, b, y_new);
    const double res_new = r_new.norm();
    if (!(res_new < res)) break;
    const bool tiny = dy.norm() <= 1e-16 * y_new.norm();
    y = y_new;
    r = r_new;
    res = res_new;
    if (tiny) break;
  }
  return res;
}

}  // namespace detail

/// Direct solve of the symmetrically scaled system (velocity and multiplier
/// by nu^{-1/2}, pressure by nu^{1/2}), whose matrix does not depend on nu.
///
/// The saddle point is factored as the quasi-definite matrix with -eps on the
/// pressure diagonal (sparse LDL^T, no pivoting needed) and the exact system
/// is recovered by refinement with an extended-precision residual.  The
/// extended residual also matters at small nu, where the gradient part of the
/// load dwarfs the viscous part.  Sparse LU is the fallback.
inline SolveResult solve(const ReducedSystem& red, const Discretization& disc) {
  const int nf = static_cast<int>(red.rhs.size());
  const double su = 1.0 / std::sqrt(red.nu);
  const double sp = std::sqrt(red.nu);
  Eigen::VectorXd scale(nf);
  std::vector<char> is_constraint(nf, 0);
  for (int i = 0; i < nf; ++i) {
    const int full = red.free_to_full[i];
    if (full < disc.dofs.num_velocity()) {
      scale[i] = su;
    } else {
      scale[i] = full == disc.dofs.multiplier() ? su : sp;
      is_constraint[i] = 1;
    }
  }
  Eigen::SparseMatrix<double> k = scale.asDiagonal() * red.matrix * scale.asDiagonal();
  k.makeCompressed();
  const Eigen::VectorXd b = scale.asDiagonal() * red.rhs;
  const double bnorm = b.norm();

  double min_area = std::numeric_limits<double>::infinity();
  for (const auto& el : disc.elements) min_area = std::min(min_area, el.pack.geometry.area);
  const double eps = 1e-10 * min_area;
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(nf);
  for (int i = 0; i < nf; ++i) {
    if (is_constraint[i]) shift[i] = -eps;
  }
  Eigen::SparseMatrix<double> diag(nf, nf);
  diag.setIdentity();
  const Eigen::SparseMatrix<double> kreg = k + shift.asDiagonal() * diag;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(nf);
  double res = bnorm;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(kreg);
  if (ldlt.info() == Eigen::Success) {
    res = detail::refine(k, b, y, [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return ldlt.solve(r); }, 40);
  }
  if (!(res <= 1e-13 * bnorm) && bnorm > 0.0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse LU factorization failed: " + lu.lastErrorMessage());
    y = lu.solve(b);
    res = detail::refine(k, b, y, [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { return lu.solve(r); }, 6);
  }
  const double rel = bnorm > 0.0 ? res / bnorm : res;
  if (!std::isfinite(rel) || rel > 1e-10) {
    throw NumericalError("linear solve residual " + std::to_string(rel) + " above tolerance");
  }
  const Eigen::VectorXd x = scale.asDiagonal() * y;

  SolveResult out;
  out.nu = red.nu;
  out.residual = rel;
  out.velocity = red.dirichlet.values;
  out.pressure = Eigen::VectorXd::Zero(disc.dofs.num_pressure());
  for (int i = 0; i < nf; ++i) {
    const int full = red.free_to_full[i];
    if (full < disc.dofs.num_velocity()) out.velocity[full] = x[i];
    else if (full == disc.dofs.multiplier()) out.multiplier = x[i];
    else out.pressure[full - disc.dofs.num_velocity()] = x[i];
  }
  double mean = 0.0;
  for (int c = 0; c < disc.mesh.num_cells(); ++c) mean += out.pressure[c] * disc.elements[c].pack.geometry.area;
  out.pressure.array() -= mean / disc.domain_area;
  return out;
}

/// Assemble, impose g, solve.
inline SolveResult solve_problem(const Discretization& disc, const ProblemData& data) {
  const auto sys = assemble(disc, data);
  const auto red = apply_dirichlet(sys, disc, data.g);
  return solve(red, disc);
}

/// Constant divergence of u_h on every cell.
inline Eigen::VectorXd divergence_field(const Discretization& disc, const SolveResult& r) {
  Eigen::VectorXd d(disc.mesh.num_cells());
  for (int c = 0; c < disc.mesh.num_cells(); ++c) {
    d[c] = disc.elements[c].pack.div_row.dot(disc.local_dofs(c, r.velocity));
  }
  return d;
}

/// Global DOF vector of an analytic velocity field.
template <class F>
Eigen::VectorXd interpolate_velocity(const Discretization& disc, F&& u) {
  const auto& m = disc.mesh;
  Eigen::VectorXd v(disc.dofs.num_velocity());
  for (int i = 0; i < m.num_vertices(); ++i) {
    const Vec2 uv = u(m.vertex(i));
    v[disc.dofs.vertex(i, 0)] = uv.x;
    v[disc.dofs.vertex(i, 1)] = uv.y;
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    const Vec2 n = m.edge_normal(e);
    v[disc.dofs.edge(e)] =
        integrate_segment(m.vertex(ed.v0), m.vertex(ed.v1), [&](Point2 p) { return dot(u(p), n); }) /
        m.edge_length(e);
  }
  return v;
}

}  // namespace brinkvem
