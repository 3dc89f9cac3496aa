#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "dgflow/bench.hpp"
#include "dgflow/errors.hpp"

using namespace dgflow;

namespace {

ConvergenceReport small_study(RefKind ref = RefKind::GL4Fine) {
  Problem hh = builtin_problem("henon-heiles");
  DiscreteGradient dg;
  dg.kind = DgKind::Avf;
  return run_convergence(hh, builtin_scheme("dgm2"), dg,
                         {0.2, 0.1, 0.05, 0.025}, 1.0, ref);
}

} // namespace

TEST_CASE("study ladder validation") {
  Problem hh = builtin_problem("henon-heiles");
  DiscreteGradient dg;
  dg.kind = DgKind::Avf;
  SbarScheme s = builtin_scheme("dgm2");
  CHECK_THROWS_AS(run_convergence(hh, s, dg, {}, 1.0), ConfigError);
  CHECK_THROWS_AS(run_convergence(hh, s, dg, {0.1, -0.05}, 1.0), ConfigError);
  CHECK_THROWS_AS(run_convergence(hh, s, dg, {0.1, 0.1}, 1.0), ConfigError);
  CHECK_THROWS_AS(run_convergence(hh, s, dg, {0.05, 0.1}, 1.0), ConfigError);
  CHECK_THROWS_AS(run_convergence(hh, s, dg, {0.1, 0.05}, 0.0), ConfigError);
}

TEST_CASE("second-order study lands on slope two") {
  ConvergenceReport rep = small_study();
  CHECK(rep.problem == "henon-heiles");
  CHECK(rep.scheme == "dgm2");
  CHECK(rep.dg == "avf");
  CHECK(rep.reference.find("gl4-fine") == 0);
  CHECK(rep.reference_accuracy > 0.0);
  REQUIRE(rep.points.size() == 4);
  for (const ConvergencePoint& p : rep.points) {
    CHECK_FALSE(p.failed);
    CHECK(p.error > 0.0);
  }
  // errors shrink along the ladder
  for (size_t i = 1; i < rep.points.size(); ++i)
    CHECK(rep.points[i].error < rep.points[i - 1].error);
  REQUIRE(rep.has_slope);
  CHECK(rep.points_in_fit >= 3);
  CHECK(rep.fitted_slope > 1.7);
  CHECK(rep.fitted_slope < 2.3);
}

TEST_CASE("self-referenced study agrees with the exact-flow reference") {
  ConvergenceReport gl = small_study(RefKind::GL4Fine);
  ConvergenceReport self = small_study(RefKind::SchemeFine);
  CHECK(self.reference.find("scheme-fine") == 0);
  REQUIRE(gl.has_slope);
  REQUIRE(self.has_slope);
  CHECK(std::fabs(gl.fitted_slope - self.fitted_slope) < 0.1);
}

TEST_CASE("steps snap onto the horizon") {
  Problem hh = builtin_problem("henon-heiles");
  DiscreteGradient dg;
  dg.kind = DgKind::Avf;
  ConvergenceReport rep = run_convergence(hh, builtin_scheme("dgm2"), dg,
                                          {0.4, 0.2, 0.1}, 1.0);
  // 0.4 does not divide 1.0; the study rounds the step count up
  CHECK(rep.points[0].h == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rep.points[1].h == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("incompatible pairing marks every point failed") {
  Problem lv = builtin_problem("lotka-volterra");
  DiscreteGradient dg;
  dg.kind = DgKind::Avf;
  // this scheme needs a constant skew matrix, which the problem lacks
  ConvergenceReport rep = run_convergence(lv, builtin_scheme("dgm3-const"),
                                          dg, {0.1, 0.05, 0.025}, 0.5);
  CHECK_FALSE(rep.has_slope);
  CHECK(rep.points_in_fit == 0);
  for (const ConvergencePoint& p : rep.points) {
    CHECK(p.failed);
    CHECK_FALSE(p.failure.empty());
  }
  std::string csv = convergence_csv(rep);
  CHECK(csv.find(",nan,nan") != std::string::npos);
}

TEST_CASE("study output is byte-stable") {
  std::string a = convergence_csv(small_study());
  std::string b = convergence_csv(small_study());
  CHECK(a == b);
  CHECK(a.rfind("h,error,slope_running\n", 0) == 0);
  // running slope needs two usable points, so the first row carries nan
  size_t eol = a.find('\n', a.find('\n') + 1);
  std::string first_row = a.substr(a.find('\n') + 1, eol - a.find('\n') - 1);
  CHECK(first_row.substr(first_row.rfind(',') + 1) == "nan");
}

TEST_CASE("energy drift series") {
  Trajectory t;
  t.times = {0.0};
  t.energies = {2.5};
  t.states = {Vec{1.0, 0.0}};
  DriftSeries d = energy_drift(t);
  REQUIRE(d.t.size() == 1);
  CHECK(d.h_err[0] == 0.0);
  CHECK(d.max_drift == 0.0);

  t.times = {0.0, 0.1, 0.2};
  t.energies = {2.5, 2.5 + 1e-13, 2.5 - 3e-13};
  d = energy_drift(t);
  CHECK(d.h_err[1] == doctest::Approx(1e-13).epsilon(1e-6));
  CHECK(d.max_drift == doctest::Approx(3e-13).epsilon(1e-6));

  Trajectory empty;
  CHECK_THROWS_AS(energy_drift(empty), ConfigError);

  std::string csv = drift_csv(d);
  CHECK(csv.rfind("t,H_err\n", 0) == 0);
  size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);
}

TEST_CASE("plot scripts reference the csv and use comma separation") {
  std::string c = convergence_plot_script("out/conv.csv", "order sweep");
  CHECK(c.find("set datafile separator") != std::string::npos);
  CHECK(c.find("out/conv.csv") != std::string::npos);
  CHECK(c.find("logscale") != std::string::npos);
  std::string dr = drift_plot_script("out/drift.csv", "drift");
  CHECK(dr.find("set datafile separator") != std::string::npos);
  CHECK(dr.find("out/drift.csv") != std::string::npos);
}

TEST_CASE("worker count comes from the environment, clamped") {
  unsetenv("DGFLOW_THREADS");
  CHECK(bench_threads() == 1);
  setenv("DGFLOW_THREADS", "", 1);
  CHECK(bench_threads() == 1);
  setenv("DGFLOW_THREADS", "4", 1);
  CHECK(bench_threads() == 4);
  setenv("DGFLOW_THREADS", "0", 1);
  CHECK(bench_threads() == 1);
  setenv("DGFLOW_THREADS", "999", 1);
  CHECK(bench_threads() == 64);
  setenv("DGFLOW_THREADS", "pony", 1);
  CHECK(bench_threads() == 1);
  unsetenv("DGFLOW_THREADS");
}
