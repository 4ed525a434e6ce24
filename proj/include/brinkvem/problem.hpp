// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "brinkvem/core.hpp"
#include "brinkvem/quadrature.hpp"

namespace brinkvem {

using VectorField = std::function<Vec2(Point2)>;
using ScalarField = std::function<double(Point2)>;

enum class RhsMode { robust, standard };

inline std::string to_string(RhsMode m) { return m == RhsMode::robust ? "robust" : "standard"; }

/// Element-wise constant inverse permeability kappa^{-1} >= 0, given as a
/// constant, per-cell values, or a function sampled at the cell centroid.
class InversePermeability {
 public:
  InversePermeability() = default;

  static InversePermeability constant(double kinv) {
    check(kinv);
    InversePermeability k;
    k.source_ = kinv;
    return k;
  }
  static InversePermeability per_cell(std::vector<double> values) {
    for (double v : values) check(v);
    InversePermeability k;
    k.source_ = std::move(values);
    return k;
  }
  static InversePermeability function(ScalarField f) {
    InversePermeability k;
    k.source_ = std::move(f);
    return k;
  }

  double at(int cell, Point2 centroid) const {
    if (const auto* c = std::get_if<double>(&source_)) return *c;
    if (const auto* v = std::get_if<std::vector<double>>(&source_)) {
      if (cell < 0 || cell >= static_cast<int>(v->size())) {
        throw InputError("per-cell permeability has no value for cell " + std::to_string(cell));
      }
      return (*v)[cell];
    }
    const double val = std::get<ScalarField>(source_)(centroid);
    check(val);
    return val;
  }

  bool is_per_cell() const { return std::holds_alternative<std::vector<double>>(source_); }

 private:
  static void check(double v) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("inverse permeability must be finite and >= 0");
  }
  std::variant<double, std::vector<double>, ScalarField> source_ = 0.0;
};

/// Data of -nu Laplace(u) + nu kappa^{-1} u - grad p = f, div u = 0, u = g on
/// the boundary.
struct ProblemData {
  double nu = 1.0;
  InversePermeability kappa_inv = InversePermeability::constant(1.0);
  VectorField f = [](Point2) { return Vec2{}; };
  VectorField g = [](Point2) { return Vec2{}; };
  RhsMode rhs = RhsMode::robust;
  QuadOptions quad{};

  void validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InputError("viscosity must be positive");
    if (!f || !g) throw InputError("force and boundary data must be set");
  }
};

}  // namespace brinkvem
