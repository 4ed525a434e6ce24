// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "brinkvem/cases.hpp"
#include "brinkvem/kappa_raster.hpp"
#include "brinkvem/quadrature.hpp"

using namespace brinkvem;

namespace {

constexpr double kStep = 1e-5;

Vec2 fd_laplacian(const ExactSolution& ex, Point2 x) {
  const Point2 dx{kStep, 0.0}, dy{0.0, kStep};
  const Mat2 gx = (ex.grad_u(x + dx) - ex.grad_u(x - dx)) / (2 * kStep);
  const Mat2 gy = (ex.grad_u(x + dy) - ex.grad_u(x - dy)) / (2 * kStep);
  return Vec2{gx(0, 0) + gy(0, 1), gx(1, 0) + gy(1, 1)};
}

Vec2 fd_gradient(const ScalarField& p, Point2 x) {
  return Vec2{(p(x + Point2{kStep, 0}) - p(x - Point2{kStep, 0})) / (2 * kStep),
              (p(x + Point2{0, kStep}) - p(x - Point2{0, kStep})) / (2 * kStep)};
}

struct Setting {
  std::string name;
  double nu;
  double kinv;
};

void PrintTo(const Setting& s, std::ostream* os) { *os << s.name << " nu=" << s.nu << " kinv=" << s.kinv; }

}  // namespace

class ManufacturedForce : public ::testing::TestWithParam<Setting> {};

// f must equal -nu Lap u + nu kappa^{-1} u - grad p, checked with central
// differences of the closed-form gradient and pressure.
TEST_P(ManufacturedForce, MatchesFiniteDifferences) {
  const auto s = GetParam();
  CaseParameters prm;
  prm.nu = s.nu;
  prm.kappa = 1.0 / s.kinv;
  const auto c = case_registry(s.name, prm);
  ASSERT_TRUE(c.exact.has_value());
  const auto& ex = *c.exact;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 40; ++i) {
    const Point2 x{unit(rng), unit(rng)};
    const Vec2 lap = fd_laplacian(ex, x);
    const Vec2 gp = fd_gradient(ex.p, x);
    const Vec2 f = -s.nu * lap + (s.nu * s.kinv) * ex.u(x) - gp;
    const double scale = s.nu * norm(lap) + s.nu * s.kinv * norm(ex.u(x)) + norm(gp) + 1.0;
    EXPECT_LE(norm(c.data.f(x) - f), 1e-6 * scale) << s.name << " at " << x.x << "," << x.y;
  }
}

TEST_P(ManufacturedForce, GradientAndDivergence) {
  const auto s = GetParam();
  CaseParameters prm;
  prm.nu = s.nu;
  const auto c = case_registry(s.name, prm);
  const auto& ex = *c.exact;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 40; ++i) {
    const Point2 x{unit(rng), unit(rng)};
    const Mat2 g = ex.grad_u(x);
    EXPECT_LE(std::abs(g.trace()), 1e-12 * (g.norm() + 1.0));
    const Vec2 dx = (ex.u(x + Point2{kStep, 0}) - ex.u(x - Point2{kStep, 0})) / (2 * kStep);
    const Vec2 dy = (ex.u(x + Point2{0, kStep}) - ex.u(x - Point2{0, kStep})) / (2 * kStep);
    Mat2 fd;
    fd << dx.x, dy.x, dx.y, dy.y;
    EXPECT_LE((fd - g).norm(), 1e-6 * (g.norm() + 1.0));
  }
}

TEST_P(ManufacturedForce, PressureHasZeroMean) {
  const auto s = GetParam();
  const auto c = case_registry(s.name);
  const auto mesh = generate_square_mesh(32);
  double mean = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    const auto g = element_geometry(mesh, k);
    mean += integrate_polygon(fan_triangulate(g), c.exact->p, QuadOptions{6});
  }
  EXPECT_LE(std::abs(mean), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Cases, ManufacturedForce,
                         ::testing::Values(Setting{"ex61", 1.0, 1.0}, Setting{"ex61", 1e-3, 7.0},
                                           Setting{"ex64", 1e-2, 1.0}, Setting{"ex65", 1e-2, 1.0},
                                           Setting{"ex66", 0.5, 0.01}),
                         [](const auto& info) {
                           return info.param.name + "_" + std::to_string(info.index);
                         });

TEST(CaseRegistry, Defaults) {
  const auto a = case_registry("ex61");
  EXPECT_EQ(a.data.nu, 1.0);
  EXPECT_EQ(a.data.kappa_inv.at(0, {}), 1.0);
  const auto b = case_registry("ex64");
  EXPECT_EQ(b.data.nu, 1e-2);
  const auto d = case_registry("ex66");
  EXPECT_EQ(d.data.nu, 0.5);
  EXPECT_DOUBLE_EQ(d.data.kappa_inv.at(0, {}), 0.01);
}

TEST(CaseRegistry, BoundaryDataIsTheExactTrace) {
  for (const std::string name : {"ex61", "ex64", "ex65", "ex66"}) {
    const auto c = case_registry(name);
    for (double t : {0.0, 0.3, 1.0}) {
      const Point2 p{t, 1.0};
      EXPECT_EQ(c.data.g(p).x, c.exact->u(p).x);
      EXPECT_EQ(c.data.g(p).y, c.exact->u(p).y);
    }
  }
}

TEST(CaseRegistry, Ex64VanishesOnBoundary) {
  const auto c = case_registry("ex64");
  for (double t : {0.0, 0.2, 0.7, 1.0}) {
    for (const Point2 p : {Point2{t, 0.0}, Point2{t, 1.0}, Point2{0.0, t}, Point2{1.0, t}}) {
      EXPECT_LE(norm(c.exact->u(p)), 1e-15);
    }
  }
}

TEST(CaseRegistry, Rejections) {
  EXPECT_THROW(case_registry("nope"), InputError);
  EXPECT_THROW(case_registry("fibrous"), InputError);
  CaseParameters bad;
  bad.nu = -1.0;
  EXPECT_THROW(case_registry("ex61", bad), InputError);
  CaseParameters bad_k;
  bad_k.kappa = 0.0;
  EXPECT_THROW(case_registry("ex61", bad_k), InputError);
}

TEST(KappaRaster, ParseAndOrientation) {
  std::istringstream in("2 2\n1 2\n3 4\n");
  const auto r = parse_kappa_raster(in);
  ASSERT_EQ(r.nx, 2);
  ASSERT_EQ(r.ny, 2);
  const BoundingBox box{};
  EXPECT_EQ(r.lookup({0.25, 0.75}, box), 1.0);  // top-left
  EXPECT_EQ(r.lookup({0.75, 0.75}, box), 2.0);
  EXPECT_EQ(r.lookup({0.25, 0.25}, box), 3.0);
  EXPECT_EQ(r.lookup({0.75, 0.25}, box), 4.0);
  EXPECT_EQ(r.lookup({1.0, 0.0}, box), 4.0);  // clamped corner
}

TEST(KappaRaster, Rejections) {
  for (const char* text : {"", "2\n1 2\n", "2 1\n1\n", "1 1\n-1\n", "1 1\nabc\n", "1 2\n1\n", "1 1\n1\n2\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_kappa_raster(in), InputError) << text;
  }
  EXPECT_THROW(load_kappa_raster("/nonexistent/raster.txt"), InputError);
}

TEST(KappaRaster, ChannelCaseSamplesCentroids) {
  const auto path = std::filesystem::temp_directory_path() / "brinkvem_raster_test.txt";
  {
    std::ofstream out(path);
    out << "2 1\n1 1000000\n";
  }
  CaseParameters prm;
  prm.kappa_raster = path.string();
  const auto c = case_registry("fibrous", prm);
  EXPECT_EQ(c.data.kappa_inv.at(0, {0.2, 0.5}), 1.0);
  EXPECT_EQ(c.data.kappa_inv.at(0, {0.8, 0.5}), 1e6);
  EXPECT_EQ(c.data.g({0.0, 0.3}).x, 1.0);
  EXPECT_FALSE(c.exact.has_value());
  const auto mesh = generate_square_mesh(2);
  const auto k = kappa_field(load_kappa_raster(path.string()), mesh);
  EXPECT_EQ(k[0], 1.0);
  EXPECT_EQ(k[1], 1e-6);
  std::filesystem::remove(path);
}
