// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "brinkvem/vem_local.hpp"
#include "test_support.hpp"

using namespace brinkvem;

namespace {

ElementGeometry unit_square() { return polygon_geometry({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

ElementGeometry pentagon() { return polygon_geometry({{0, 0}, {2, 0}, {3, 1.5}, {1, 3}, {-1, 1.5}}); }

ProjectorPack pack_of(const ElementGeometry& g) { return compute_projectors(g, fan_triangulate(g)); }

// Affine field A x + c.
struct Affine {
  Mat2 a;
  Vec2 c;
  Vec2 operator()(Point2 p) const { return apply(a, p) + c; }
};

Affine random_affine(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1, 1);
  Affine f;
  f.a << d(rng), d(rng), d(rng), d(rng);
  f.c = {d(rng), d(rng)};
  return f;
}

}  // namespace

TEST(EdgeTrace, ConstantAndLinearFields) {
  const auto g = unit_square();
  const auto d = dof_interpolate([](Point2) { return Vec2{1.0, 0.0}; }, g);
  for (int e = 0; e < 4; ++e) {
    const auto tr = edge_trace(d, g, e);
    EXPECT_NEAR(d[8 + e], g.normal[e].x, 1e-15);
    for (double t : {0.0, 0.3, 1.0}) {
      EXPECT_NEAR(tr.value(t).x, 1.0, 1e-15);
      EXPECT_NEAR(tr.value(t).y, 0.0, 1e-15);
    }
  }
  const auto dl = dof_interpolate([](Point2 p) { return Vec2{p.x, p.y}; }, g);
  const auto top = edge_trace(dl, g, 2);
  EXPECT_NEAR(dl[8 + 2], 1.0, 1e-15);
  for (double t : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(top.normal_at(t), 1.0, 1e-15);
}

TEST(EdgeTrace, MeanEqualsDofForRandomData) {
  std::mt19937 rng(3);
  const auto g = pentagon();
  const auto& gl = edge_gauss(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = testkit::random_vector(rng, 15);
    for (int e = 0; e < 5; ++e) {
      const auto tr = edge_trace(d, g, e);
      double s = 0.0;
      for (std::size_t q = 0; q < 3; ++q) s += gl.weights[q] * tr.normal_at(gl.points[q]);
      EXPECT_NEAR(s * g.edge_length[e], g.edge_length[e] * d[10 + e], 1e-14);
      EXPECT_NEAR(tr.normal_at(0.0), d[2 * e] * g.normal[e].x + d[2 * e + 1] * g.normal[e].y, 1e-15);
    }
  }
}

TEST(Projectors, ReproduceLinearFieldsOnRandomPolygons) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = testkit::random_polygon(rng, 3 + trial % 8, trial % 3 == 0);
    const auto pk = pack_of(g);
    const auto f = random_affine(rng);
    const auto d = dof_interpolate(f, g);
    std::vector<Point2> pts = g.vertices;
    pts.push_back(g.centroid);
    const auto vn = evaluate_projection(pk, d, Projection::nabla, pts);
    const auto v0 = evaluate_projection(pk, d, Projection::zero, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_LT(norm(vn[i] - f(pts[i])), 1e-12);
      EXPECT_LT(norm(v0[i] - f(pts[i])), 1e-12);
    }
    const Mat2 grad = projection_gradient(pk, d);
    EXPECT_LT((grad - f.a).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Projectors, ConstantFieldGivesSameConstant) {
  const auto g = pentagon();
  const auto pk = pack_of(g);
  const auto d = dof_interpolate([](Point2) { return Vec2{1.0, 0.0}; }, g);
  const Eigen::VectorXd cn = pk.pi_nabla * d;
  const Eigen::VectorXd c0 = pk.pi_zero * d;
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(6);
  expect[0] = 1.0;
  EXPECT_LT((cn - expect).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((c0 - expect).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(pk.vertex_average_x.dot(d), 1.0, 1e-15);
}

// Independent assembly of (grad v, grad p_a) = sum_e int_e v . (grad p_a n) with
// 3-point Gauss on the reconstructed traces.
TEST(Projectors, EnergyOrthogonalityOnPentagon) {
  std::mt19937 rng(9);
  const auto g = pentagon();
  const auto pk = pack_of(g);
  const auto& gl = edge_gauss(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = testkit::random_vector(rng, 15);
    const Eigen::VectorXd c = pk.pi_nabla * d;
    const Mat2 gp = pk.basis.gradient(c);
    for (int a = 0; a < 6; ++a) {
      const Mat2 ga = pk.basis.gradient(a);
      double lhs = 0.0;
      for (int e = 0; e < 5; ++e) {
        const auto tr = edge_trace(d, g, e);
        const Vec2 w = apply(ga, g.normal[e]);
        for (std::size_t q = 0; q < 3; ++q) lhs += gl.weights[q] * g.edge_length[e] * dot(tr.value(gl.points[q]), w);
      }
      const double rhs = g.area * gp.cwiseProduct(ga).sum();
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

// (Pi0 v, p) against the three-term formula using the hand decomposition
// p = grad s + c (eta, -xi) of each basis member.
TEST(Projectors, L2MomentsMatchIndependentThreeTermFormula) {
  std::mt19937 rng(13);
  for (const auto& g : {unit_square(), pentagon()}) {
    const auto pk = pack_of(g);
    const auto st = fan_triangulate(g);
    const double h = g.diameter;
    const auto xi = [&](Point2 p) { return (p.x - g.centroid.x) / h; };
    const auto eta = [&](Point2 p) { return (p.y - g.centroid.y) / h; };
    // s_k and c_k with p_k = grad s_k + c_k (eta, -xi).
    const std::array<std::function<double(Point2)>, 6> s{
        [&](Point2 p) { return h * xi(p); },
        [&](Point2 p) { return 0.5 * h * xi(p) * xi(p); },
        [&](Point2 p) { return 0.5 * h * xi(p) * eta(p); },
        [&](Point2 p) { return h * eta(p); },
        [&](Point2 p) { return 0.5 * h * xi(p) * eta(p); },
        [&](Point2 p) { return 0.5 * h * eta(p) * eta(p); }};
    const std::array<double, 6> cg{0, 0, 0.5, 0, -0.5, 0};
    const auto& gl = edge_gauss(3);
    for (int trial = 0; trial < 5; ++trial) {
      const auto d = testkit::random_vector(rng, pk.num_dofs());
      const Eigen::VectorXd c0 = pk.pi_zero * d;
      const Eigen::VectorXd cn = pk.pi_nabla * d;
      const double divv = pk.div_row.dot(d);
      for (int k = 0; k < 6; ++k) {
        double rhs = -divv * integrate_polygon(st, s[k], 4);
        for (int e = 0; e < g.num_vertices(); ++e) {
          const auto tr = edge_trace(d, g, e);
          for (std::size_t q = 0; q < 3; ++q) {
            const Point2 x = g.vertex(e) + gl.points[q] * (g.vertex(e + 1) - g.vertex(e));
            rhs += gl.weights[q] * g.edge_length[e] * tr.normal_at(gl.points[q]) * s[k](x);
          }
        }
        rhs += cg[k] * integrate_polygon(
                           st, [&](Point2 p) { return dot(pk.basis.evaluate(cn, p), Vec2{eta(p), -xi(p)}); }, 4);
        const double lhs = integrate_polygon(
            st, [&](Point2 p) { return dot(pk.basis.evaluate(c0, p), pk.basis.value(k, p)); }, 4);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
      }
    }
  }
}

TEST(DivergenceRow, Examples) {
  const auto g = unit_square();
  const auto row = divergence_row(g);
  EXPECT_NEAR(row.dot(dof_interpolate([](Point2 p) { return Vec2{p.x, p.y}; }, g)), 2.0, 1e-14);
  EXPECT_NEAR(row.dot(dof_interpolate([](Point2 p) { return Vec2{-p.y, p.x}; }, g)), 0.0, 1e-14);
  std::mt19937 rng(1);
  const auto pg = pentagon();
  const auto d = testkit::random_vector(rng, 15);
  double s = 0.0;
  for (int e = 0; e < 5; ++e) s += pg.edge_length[e] * d[10 + e];
  EXPECT_NEAR(divergence_row(pg).dot(d), s / pg.area, 1e-14);
  for (int j = 0; j < 10; ++j) EXPECT_EQ(divergence_row(pg)[j], 0.0);
}

TEST(Stabilization, KillsLinearFieldsAndScales) {
  const auto g = pentagon();
  const auto pk = pack_of(g);
  const auto stab = stabilization_matrices(pk, 2.0);
  std::mt19937 rng(2);
  const auto d = dof_interpolate(random_affine(rng), g);
  const Eigen::VectorXd rn = d - pk.dof_of_p1 * (pk.pi_nabla * d);
  const Eigen::VectorXd r0 = d - pk.dof_of_p1 * (pk.pi_zero * d);
  EXPECT_LT(rn.dot(stab.s_nabla * rn), 1e-24);
  EXPECT_LT(r0.dot(stab.s_zero * r0), 1e-24);
  // Dilation by 2: dofi-dofi unchanged, |E|/kappa multiplies by 4.
  std::vector<Point2> big;
  for (const auto& p : g.vertices) big.push_back(2.0 * p);
  const auto pk2 = pack_of(polygon_geometry(big));
  const auto stab2 = stabilization_matrices(pk2, 2.0);
  EXPECT_NEAR((stab2.s_nabla - stab.s_nabla).norm(), 0.0, 0.0);
  EXPECT_NEAR(stab2.s_zero(0, 0), 4.0 * stab.s_zero(0, 0), 1e-12);
  EXPECT_THROW(stabilization_matrices(pk, -1.0), InputError);
}

TEST(LocalForms, ConsistencyOnLinearFields) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testkit::random_polygon(rng, 3 + trial % 6, trial % 2 == 1);
    const auto st = fan_triangulate(g);
    const auto pk = compute_projectors(g, st);
    const double kinv = 0.5 + trial;
    const auto lf = local_forms(pk, kinv);
    const auto p = random_affine(rng);
    const auto q = random_affine(rng);
    const double discrete = dof_interpolate(p, g).dot(lf.a * dof_interpolate(q, g));
    const double exact = g.area * p.a.cwiseProduct(q.a).sum() +
                         kinv * integrate_polygon(st, [&](Point2 x) { return dot(p(x), q(x)); }, 2);
    EXPECT_NEAR(discrete, exact, 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST(LocalForms, SymmetryDefinitenessAndKernel) {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testkit::random_polygon(rng, 3 + trial % 8, trial % 4 == 0);
    const auto pk = pack_of(g);
    for (double kinv : {0.0, 1.0}) {
      const auto lf = local_forms(pk, kinv);
      const double scale = lf.a.cwiseAbs().maxCoeff();
      EXPECT_LE((lf.a - lf.a.transpose()).cwiseAbs().maxCoeff(), 1e-13 * scale);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lf.a);
      const auto& ev = es.eigenvalues();
      EXPECT_GE(ev.minCoeff(), -1e-12 * scale);
      int zero = 0;
      for (int i = 0; i < ev.size(); ++i) zero += ev[i] < 1e-10 * scale;
      EXPECT_EQ(zero, kinv == 0.0 ? 2 : 0);
    }
  }
}

TEST(LocalForms, DivergencePairingOnUnitSquare) {
  const auto g = unit_square();
  const auto lf = local_forms(pack_of(g), 1.0);
  EXPECT_NEAR(lf.b.dot(dof_interpolate([](Point2 p) { return Vec2{p.x, p.y}; }, g)), 2.0, 1e-14);
}

TEST(DofInterpolate, TrigonometricFieldBottomEdge) {
  const auto g = unit_square();
  const double tp = 2.0 * std::numbers::pi;
  const auto d = dof_interpolate(
      [&](Point2 p) {
        return Vec2{std::sin(tp * p.x) * std::cos(tp * p.y), -std::cos(tp * p.x) * std::sin(tp * p.y)};
      },
      g);
  EXPECT_NEAR(d[8], 0.0, 1e-15);
  EXPECT_NEAR(d[0], 0.0, 1e-15);
}
