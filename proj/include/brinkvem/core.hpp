// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace brinkvem {

/// A position or a vector in the plane.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
  constexpr Point2& operator+=(Point2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

using Vec2 = Point2;
using Mat2 = Eigen::Matrix2d;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
/// Rotation by -90 degrees: the right-hand normal of a direction.
constexpr Vec2 rotate_cw(Vec2 a) { return {a.y, -a.x}; }
constexpr Vec2 rotate_ccw(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 apply(const Mat2& m, Vec2 v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}

/// Twice the signed area of the triangle (a, b, c); positive when CCW.
constexpr double orient2d(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid mesh topology or geometry.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input: files, flags, problem data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Breakdown of a factorization or a failed accuracy check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace brinkvem
