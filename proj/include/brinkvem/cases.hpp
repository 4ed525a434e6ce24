// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "brinkvem/core.hpp"
#include "brinkvem/kappa_raster.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/problem.hpp"

namespace brinkvem {

using GradientField = std::function<Mat2(Point2)>;  // row = component

/// Closed-form solution of the Brinkman problem.
struct ExactSolution {
  VectorField u;
  GradientField grad_u;
  ScalarField p;
};

struct ManufacturedCase {
  std::string name;
  ProblemData data;
  std::optional<ExactSolution> exact;
  BoundingBox domain{};
  std::string mesh_hint = "square";
};

struct CaseParameters {
  std::optional<double> nu;
  std::optional<double> kappa;  // permeability; kappa^{-1} = 1 / kappa
  std::optional<std::string> kappa_raster;
  RhsMode rhs = RhsMode::robust;
  std::optional<int> quad_degree;
};

inline const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"ex61", "ex64", "ex65", "ex66", "fibrous", "foam"};
  return names;
}

namespace detail {

/// f = -nu Lap(u) + nu kinv u - grad p.
inline VectorField brinkman_force(double nu, double kinv, std::function<Vec2(Point2)> lap_u,
                                  VectorField u, std::function<Vec2(Point2)> grad_p) {
  return [=](Point2 x) { return -nu * lap_u(x) + (nu * kinv) * u(x) - grad_p(x); };
}

inline ManufacturedCase ex61(double nu, double kinv) {
  constexpr double tp = 2.0 * std::numbers::pi;
  ManufacturedCase c;
  c.name = "ex61";
  c.mesh_hint = "nonconvex";
  ExactSolution ex;
  ex.u = [](Point2 x) {
    return Vec2{std::sin(tp * x.x) * std::cos(tp * x.y), -std::cos(tp * x.x) * std::sin(tp * x.y)};
  };
  ex.grad_u = [](Point2 x) {
    const double sx = std::sin(tp * x.x), cx = std::cos(tp * x.x);
    const double sy = std::sin(tp * x.y), cy = std::cos(tp * x.y);
    Mat2 g;
    g << tp * cx * cy, -tp * sx * sy, tp * sx * sy, -tp * cx * cy;
    return g;
  };
  ex.p = [](Point2 x) { return x.x * x.x * x.y * x.y - 1.0 / 9.0; };
  const auto lap = [u = ex.u](Point2 x) { return (-2.0 * tp * tp) * u(x); };
  const auto gp = [](Point2 x) { return Vec2{2.0 * x.x * x.y * x.y, 2.0 * x.x * x.x * x.y}; };
  c.data.f = brinkman_force(nu, kinv, lap, ex.u, gp);
  c.data.g = ex.u;
  c.exact = ex;
  return c;
}

inline ManufacturedCase ex64(double nu, double kinv) {
  ManufacturedCase c;
  c.name = "ex64";
  c.mesh_hint = "nonconvex";
  // a = x^2 (1-x)^2, b = x (1-x)(1-2x) = a'/2.
  const auto a = [](double t) { return t * t * (1 - t) * (1 - t); };
  const auto b = [](double t) { return t - 3 * t * t + 2 * t * t * t; };
  const auto da = [](double t) { return 2 * t - 6 * t * t + 4 * t * t * t; };
  const auto db = [](double t) { return 1 - 6 * t + 6 * t * t; };
  const auto d2a = [](double t) { return 2 - 12 * t + 12 * t * t; };
  const auto d2b = [](double t) { return -6 + 12 * t; };
  ExactSolution ex;
  ex.u = [=](Point2 x) { return Vec2{10 * a(x.x) * b(x.y), -10 * b(x.x) * a(x.y)}; };
  ex.grad_u = [=](Point2 x) {
    Mat2 g;
    g << 10 * da(x.x) * b(x.y), 10 * a(x.x) * db(x.y), -10 * db(x.x) * a(x.y), -10 * b(x.x) * da(x.y);
    return g;
  };
  ex.p = [](Point2 x) { return -10 * (2 * x.x - 1) * (2 * x.y - 1); };
  const auto lap = [=](Point2 x) {
    return Vec2{10 * (d2a(x.x) * b(x.y) + a(x.x) * d2b(x.y)), -10 * (d2b(x.x) * a(x.y) + b(x.x) * d2a(x.y))};
  };
  const auto gp = [](Point2 x) { return Vec2{-20 * (2 * x.y - 1), -20 * (2 * x.x - 1)}; };
  c.data.f = brinkman_force(nu, kinv, lap, ex.u, gp);
  c.data.g = ex.u;
  c.exact = ex;
  return c;
}

inline ManufacturedCase ex65(double nu, double kinv) {
  ManufacturedCase c;
  c.name = "ex65";
  // phi(t) = (1 - e^{t/nu}) / (1 - e^{1/nu}) written without overflow.
  const double tail = std::exp(-1.0 / nu);
  const double denom = 1.0 - tail;
  const auto phi = [=](double t) { return (std::exp((t - 1.0) / nu) - tail) / denom; };
  const auto dphi = [=](double t) { return std::exp((t - 1.0) / nu) / (nu * denom); };
  const auto d2phi = [=](double t) { return std::exp((t - 1.0) / nu) / (nu * nu * denom); };
  ExactSolution ex;
  ex.u = [=](Point2 x) { return Vec2{x.y - phi(x.y), x.x - phi(x.x)}; };
  ex.grad_u = [=](Point2 x) {
    Mat2 g;
    g << 0.0, 1.0 - dphi(x.y), 1.0 - dphi(x.x), 0.0;
    return g;
  };
  ex.p = [](Point2 x) { return x.y - x.x; };
  const auto lap = [=](Point2 x) { return Vec2{-d2phi(x.y), -d2phi(x.x)}; };
  const auto gp = [](Point2) { return Vec2{-1.0, 1.0}; };
  c.data.f = brinkman_force(nu, kinv, lap, ex.u, gp);
  c.data.g = ex.u;
  c.data.quad = QuadOptions{6, true};
  c.exact = ex;
  return c;
}

inline ManufacturedCase ex66(double nu, double kinv) {
  ManufacturedCase c;
  c.name = "ex66";
  constexpr double k = 1000.0;
  // u = psi (1, -1) with psi = -k exp(-k r^2), r = 1.5 - x - y.
  const auto psi = [](Point2 x) {
    const double r = 1.5 - x.x - x.y;
    return -k * std::exp(-k * r * r);
  };
  const auto dpsi = [](Point2 x) {  // d/dx psi = d/dy psi
    const double r = 1.5 - x.x - x.y;
    return -2.0 * k * k * r * std::exp(-k * r * r);
  };
  const auto lap_psi = [](Point2 x) {
    const double r = 1.5 - x.x - x.y;
    return -k * 2.0 * (-2.0 * k + 4.0 * k * k * r * r) * std::exp(-k * r * r);
  };
  // Zero-mean shift of 2 e^x sin y over the unit square.
  const double mean = 2.0 * (std::numbers::e - 1.0) * (1.0 - std::cos(1.0));
  ExactSolution ex;
  ex.u = [=](Point2 x) {
    const double s = psi(x);
    return Vec2{s, -s};
  };
  ex.grad_u = [=](Point2 x) {
    const double d = dpsi(x);
    Mat2 g;
    g << d, d, -d, -d;
    return g;
  };
  ex.p = [=](Point2 x) { return 2.0 * std::exp(x.x) * std::sin(x.y) - mean; };
  const auto lap = [=](Point2 x) {
    const double l = lap_psi(x);
    return Vec2{l, -l};
  };
  const auto gp = [](Point2 x) {
    return Vec2{2.0 * std::exp(x.x) * std::sin(x.y), 2.0 * std::exp(x.x) * std::cos(x.y)};
  };
  c.data.f = brinkman_force(nu, kinv, lap, ex.u, gp);
  c.data.g = ex.u;
  c.data.quad = QuadOptions{6, true};
  c.exact = ex;
  return c;
}

inline ManufacturedCase channel(const std::string& name, double nu) {
  ManufacturedCase c;
  c.name = name;
  c.data.nu = nu;
  c.data.f = [](Point2) { return Vec2{}; };
  c.data.g = [](Point2) { return Vec2{1.0, 0.0}; };
  return c;
}

}  // namespace detail

/// Problem data, exact solution and defaults of a named test case.
inline ManufacturedCase case_registry(const std::string& name, const CaseParameters& prm = {}) {
  const auto kinv_of = [&](double fallback) { return prm.kappa ? 1.0 / *prm.kappa : fallback; };
  if (prm.kappa && !(*prm.kappa > 0.0)) throw InputError("permeability must be positive");
  ManufacturedCase c;
  double nu = 0.0, kinv = 0.0;
  if (name == "ex61") {
    nu = prm.nu.value_or(1.0);
    kinv = kinv_of(1.0);
    c = detail::ex61(nu, kinv);
  } else if (name == "ex64") {
    nu = prm.nu.value_or(1e-2);
    kinv = kinv_of(1.0);
    c = detail::ex64(nu, kinv);
  } else if (name == "ex65") {
    nu = prm.nu.value_or(1e-2);
    kinv = kinv_of(1.0);
    c = detail::ex65(nu, kinv);
  } else if (name == "ex66") {
    nu = prm.nu.value_or(0.5);
    kinv = kinv_of(0.01);
    c = detail::ex66(nu, kinv);
  } else if (name == "fibrous" || name == "foam") {
    nu = prm.nu.value_or(1e-2);
    c = detail::channel(name, nu);
    if (!prm.kappa_raster) throw InputError("case '" + name + "' needs a kappa raster");
    c.data.kappa_inv = raster_inverse_permeability(load_kappa_raster(*prm.kappa_raster), c.domain);
    kinv = std::numeric_limits<double>::quiet_NaN();
  } else {
    throw InputError("unknown case '" + name + "'");
  }
  if (!(nu > 0.0)) throw InputError("viscosity must be positive");
  c.data.nu = nu;
  if (!std::isnan(kinv)) {
    c.data.kappa_inv = InversePermeability::constant(kinv);
  }
  if (prm.kappa_raster && name != "fibrous" && name != "foam") {
    c.data.kappa_inv = raster_inverse_permeability(load_kappa_raster(*prm.kappa_raster), c.domain);
  }
  c.data.rhs = prm.rhs;
  if (prm.quad_degree) c.data.quad.degree = *prm.quad_degree;
  return c;
}

}  // namespace brinkvem
