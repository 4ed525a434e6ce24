// SPDX-License-Identifier: Apache-2.0
// Command-line driver: uniform convergence studies and adaptive runs.
//
// Exit codes: 0 success, 1 numerical failure, 2 bad flags or input.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "brinkvem/brinkvem.hpp"

using namespace brinkvem;

namespace {

struct Options {
  std::string case_name;
  std::optional<std::string> mesh;
  int n = 8;
  int levels = 1;
  std::optional<double> nu;
  std::optional<double> kappa;
  std::optional<std::string> kappa_raster;
  std::string rhs = "robust";
  bool adaptive = false;
  double delta = 0.4;
  int max_iters = 20;
  int tol = 10000;
  std::string out;
  std::string vtk;
  std::optional<int> quad_degree;
};

void print_table(const ConvergenceTable& t, bool adaptive) {
  std::printf("case %s  mesh %s  nu %.3g  rhs %s\n", t.case_name.c_str(), t.mesh.c_str(), t.nu,
              to_string(t.rhs).c_str());
  std::printf("%4s %7s %8s %10s %11s %6s %11s %6s %11s %6s %8s %9s\n", "lvl", "cells", "dofs",
              adaptive ? "nodes" : "h", "energy", "rate", "err_p", "rate", "eta", "rate", "eff", "div");
  for (const auto& r : t.rows) {
    if (adaptive) {
      std::printf("%4d %7d %8d %10d", r.level, r.cells, r.dofs, r.nodes);
    } else {
      std::printf("%4d %7d %8d %10.4e", r.level, r.cells, r.dofs, r.h);
    }
    std::printf(" %11.4e %6.2f %11.4e %6.2f %11.4e %6.2f %8.3f %9.1e\n", r.energy, r.rate_energy, r.pressure,
                r.rate_pressure, r.eta, r.rate_eta, r.eff, r.div_max);
  }
}

int run(const Options& o) {
  CaseParameters prm;
  prm.nu = o.nu;
  prm.kappa = o.kappa;
  prm.kappa_raster = o.kappa_raster;
  prm.rhs = o.rhs == "standard" ? RhsMode::standard : RhsMode::robust;
  prm.quad_degree = o.quad_degree;
  const auto mc = case_registry(o.case_name, prm);
  const auto spec = MeshSpec::parse(o.mesh.value_or(mc.mesh_hint));

  if (o.adaptive) {
    AdaptiveConfig cfg;
    cfg.delta = o.delta;
    cfg.max_iterations = o.max_iters;
    cfg.node_tolerance = o.tol;
    cfg.validate();
    const auto s = adaptive_study(mc, study_mesh(spec, o.n, 0, mc.domain), cfg, spec.name());
    print_table(s.table, true);
    std::printf("slope over last 3 iterations: eta %.3f, total error %.3f\n", s.slope_eta, s.slope_total);
    if (!o.out.empty()) export_csv(s.table, o.out);
    if (!o.vtk.empty() && s.trace.final_solution) {
      export_vtk(discretize(s.trace.final_mesh, mc.data.kappa_inv), *s.trace.final_solution, o.vtk);
    }
    if (!s.trace.failure.empty()) {
      std::fprintf(stderr, "adaptive loop stopped: %s\n", s.trace.failure.c_str());
      return 1;
    }
    return 0;
  }

  ConvergenceTable t;
  t.case_name = mc.name;
  t.mesh = spec.name();
  t.nu = mc.data.nu;
  t.rhs = mc.data.rhs;
  SolveResult last;
  PolygonalMesh last_mesh;
  for (int l = 0; l < o.levels; ++l) {
    last_mesh = study_mesh(spec, o.n, l, mc.domain);
    auto row = study_row(last_mesh, mc, &last);
    row.level = l;
    if (l > 0) {
      const auto& p = t.rows.back();
      row.rate_energy = observed_rate(p.h, row.h, p.energy, row.energy);
      row.rate_pressure = observed_rate(p.h, row.h, p.pressure, row.pressure);
      row.rate_eta = observed_rate(p.h, row.h, p.eta, row.eta);
    }
    t.rows.push_back(row);
  }
  print_table(t, false);
  if (!o.out.empty()) export_csv(t, o.out);
  if (!o.vtk.empty()) export_vtk(discretize(last_mesh, mc.data.kappa_inv), last, o.vtk);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pressure-robust virtual element solver for the Brinkman problem"};
  Options o;
  app.add_option("--case", o.case_name, "test case")->required()->check(CLI::IsMember(case_names()));
  app.add_option("--mesh", o.mesh, "square, nonconvex or file:<path> (default: the case's family)");
  app.add_option("--n", o.n, "cells per side of the coarsest generated mesh")->check(CLI::PositiveNumber);
  app.add_option("--levels", o.levels, "uniform refinement levels")->check(CLI::Range(1, 12));
  app.add_option("--nu", o.nu, "viscosity")->check(CLI::PositiveNumber);
  app.add_option("--kappa", o.kappa, "constant permeability")->check(CLI::PositiveNumber);
  app.add_option("--kappa-raster", o.kappa_raster, "raster of inverse permeability values")
      ->check(CLI::ExistingFile);
  app.add_option("--rhs", o.rhs, "load discretization")->check(CLI::IsMember({"robust", "standard"}));
  app.add_flag("--adaptive", o.adaptive, "run the adaptive loop");
  app.add_option("--delta", o.delta, "marking parameter in (0, 1)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--max-iters", o.max_iters, "adaptive iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "stop the adaptive loop once the mesh has this many vertices")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "CSV output path");
  app.add_option("--vtk", o.vtk, "VTK output path for the finest solution");
  app.add_option("--quad-degree", o.quad_degree, "quadrature degree")->check(CLI::IsMember({4, 6}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "unsupported mesh: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  }
}
