// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "brinkvem/core.hpp"
#include "brinkvem/mesh.hpp"

namespace brinkvem {

/// Symmetric rule on the reference triangle; points are barycentric,
/// weights sum to the reference area 1/2.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct LineRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

namespace detail {

inline void add_orbit_s21(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const auto& p : {std::array{a, a, b}, std::array{a, b, a}, std::array{b, a, a}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

inline void add_orbit_s111(TriangleRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                        std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

inline TriangleRule make_triangle_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 2:
      add_orbit_s21(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      add_orbit_s21(r, 0.445948490915964886318329253883, 0.223381589678011465944640404766);
      add_orbit_s21(r, 0.091576213509770743459571463402, 0.109951743655321867388692928567);
      break;
    case 6:
      add_orbit_s21(r, 0.249286745170910421291638553107, 0.116786275726379366030690428326);
      add_orbit_s21(r, 0.063089014491502228340331602870, 0.050844906370206816920936809106);
      add_orbit_s111(r, 0.053145049844816947353249671631, 0.310352451033784405416607733956,
                     0.082851075618373575193553456421);
      break;
    default:
      throw InputError("unsupported triangle rule degree " + std::to_string(degree));
  }
  return r;
}

inline LineRule make_line_rule(int npoints) {
  LineRule r;
  switch (npoints) {
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      r.degree = 3;
      r.points = {0.5 - d, 0.5 + d};
      r.weights = {0.5, 0.5};
      break;
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      r.degree = 5;
      r.points = {0.5 - d, 0.5, 0.5 + d};
      r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default:
      throw InputError("unsupported Gauss point count " + std::to_string(npoints));
  }
  return r;
}

}  // namespace detail

inline const TriangleRule& triangle_rule(int degree) {
  static const std::array<TriangleRule, 3> rules{detail::make_triangle_rule(2),
                                                 detail::make_triangle_rule(4),
                                                 detail::make_triangle_rule(6)};
  switch (degree) {
    case 2: return rules[0];
    case 4: return rules[1];
    case 6: return rules[2];
    default: throw InputError("unsupported triangle rule degree " + std::to_string(degree));
  }
}

inline const LineRule& edge_gauss(int npoints) {
  static const std::array<LineRule, 2> rules{detail::make_line_rule(2), detail::make_line_rule(3)};
  if (npoints == 2) return rules[0];
  if (npoints == 3) return rules[1];
  throw InputError("unsupported Gauss point count " + std::to_string(npoints));
}

/// How element integrals of data and exact solutions are evaluated.
struct QuadOptions {
  int degree = 4;
  /// Recursively split triangles on which the sampled integrand magnitude
  /// varies by more than `split_ratio` (steep layers).
  bool adaptive = false;
  double split_ratio = 1e6;
  int max_depth = 3;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}
inline double magnitude(Vec2 v) { return norm(v); }

template <class F>
auto integrate_triangle_plain(Point2 a, Point2 b, Point2 c, F&& f, const TriangleRule& rule) {
  const double jac = orient2d(a, b, c);  // 2|T|
  using R = std::decay_t<decltype(f(a))>;
  const auto& p0 = rule.points[0];
  R acc = (rule.weights[0] * jac) * f(p0[0] * a + p0[1] * b + p0[2] * c);
  for (std::size_t q = 1; q < rule.points.size(); ++q) {
    const auto& p = rule.points[q];
    acc += (rule.weights[q] * jac) * f(p[0] * a + p[1] * b + p[2] * c);
  }
  return acc;
}

template <class F>
auto integrate_triangle_split(Point2 a, Point2 b, Point2 c, F&& f, const QuadOptions& opt,
                              int depth) -> std::decay_t<decltype(f(a))> {
  const auto& rule = triangle_rule(opt.degree);
  if (depth < opt.max_depth) {
    const Point2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const Point2 p : {a, b, c, mab, mbc, mca, (a + b + c) / 3.0}) {
      const double m = magnitude(f(p));
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (hi > opt.split_ratio * lo) {
      auto acc = integrate_triangle_split(a, mab, mca, f, opt, depth + 1);
      acc += integrate_triangle_split(mab, b, mbc, f, opt, depth + 1);
      acc += integrate_triangle_split(mca, mbc, c, f, opt, depth + 1);
      acc += integrate_triangle_split(mbc, mca, mab, f, opt, depth + 1);
      return acc;
    }
  }
  return integrate_triangle_plain(a, b, c, f, rule);
}

}  // namespace detail

/// Integral of f over the triangle (a, b, c) using the rule of `degree`.
template <class F>
auto integrate_triangle(Point2 a, Point2 b, Point2 c, F&& f, int degree) {
  return detail::integrate_triangle_plain(a, b, c, f, triangle_rule(degree));
}

template <class F>
auto integrate_triangle(Point2 a, Point2 b, Point2 c, F&& f, const QuadOptions& opt) {
  if (opt.adaptive) return detail::integrate_triangle_split(a, b, c, f, opt, 0);
  return detail::integrate_triangle_plain(a, b, c, f, triangle_rule(opt.degree));
}

/// Sum over the sub-triangles of the mapped triangle rule.
template <class F>
auto integrate_polygon(const SubTriangulation& st, F&& f, const QuadOptions& opt) {
  auto acc = integrate_triangle(st.point(0, 0), st.point(0, 1), st.point(0, 2), f, opt);
  for (int t = 1; t < st.num_triangles(); ++t) {
    acc += integrate_triangle(st.point(t, 0), st.point(t, 1), st.point(t, 2), f, opt);
  }
  return acc;
}

template <class F>
auto integrate_polygon(const SubTriangulation& st, F&& f, int degree) {
  return integrate_polygon(st, f, QuadOptions{degree});
}

/// Integral over the segment [a, b] with the `npoints` Gauss rule.
template <class F>
auto integrate_segment(Point2 a, Point2 b, F&& f, int npoints = 3) {
  const auto& rule = edge_gauss(npoints);
  const double len = distance(a, b);
  auto acc = (rule.weights[0] * len) * f(a + rule.points[0] * (b - a));
  for (std::size_t q = 1; q < rule.points.size(); ++q) {
    acc += (rule.weights[q] * len) * f(a + rule.points[q] * (b - a));
  }
  return acc;
}

/// Scaled monomials ((x - x_D) / h_D)^alpha with |alpha| <= degree, ordered
/// 1, xi, eta, xi^2, xi eta, eta^2.
class ScaledMonomials {
 public:
  ScaledMonomials(Point2 center, double scale, int degree) : center_(center), scale_(scale), degree_(degree) {
    if (degree < 0 || degree > 2) throw InputError("scaled monomials support degree 0..2");
    for (int d = 0; d <= degree; ++d) {
      for (int j = 0; j <= d; ++j) exponents_.push_back({d - j, j});
    }
  }

  int size() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  Point2 center() const { return center_; }
  double scale() const { return scale_; }
  std::array<int, 2> exponent(int i) const { return exponents_[i]; }

  double value(int i, Point2 p) const {
    const double xi = (p.x - center_.x) / scale_;
    const double eta = (p.y - center_.y) / scale_;
    return ipow(xi, exponents_[i][0]) * ipow(eta, exponents_[i][1]);
  }

  Vec2 gradient(int i, Point2 p) const {
    const double xi = (p.x - center_.x) / scale_;
    const double eta = (p.y - center_.y) / scale_;
    const auto [a, b] = exponents_[i];
    const double dx = a == 0 ? 0.0 : a * ipow(xi, a - 1) * ipow(eta, b) / scale_;
    const double dy = b == 0 ? 0.0 : b * ipow(xi, a) * ipow(eta, b - 1) / scale_;
    return {dx, dy};
  }

 private:
  static double ipow(double v, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
  }

  Point2 center_;
  double scale_;
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
};

inline ScaledMonomials monomials(const ElementGeometry& g, int degree) {
  return ScaledMonomials(g.centroid, g.diameter, degree);
}

}  // namespace brinkvem
