#pragma once
// One-step solve of x^ = x + h*Sbar(x,x^,h)*dgrad(x,x^) and trajectory
// integration, plus the non-preserving reference integrators used to measure
// convergence orders and energy-drift baselines.

#include <string>
#include <vector>

#include "dgflow/dg.hpp"
#include "dgflow/sbar.hpp"
#include "dgflow/system.hpp"

namespace dgflow {

enum class SolveStrategy { Newton, QuasiNewtonFrozenSbar, FixedPoint };
enum class Predictor { ExplicitEuler, PreviousStep };

struct SolverConfig {
  double tol = 1e-12; // inf-norm residual threshold
  int max_iter = 50;
  SolveStrategy strategy = SolveStrategy::Newton;
  Predictor predictor = Predictor::ExplicitEuler;
};

SolveStrategy strategy_from_name(const std::string& name);
const char* strategy_name(SolveStrategy s);

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history; // residual per iteration, in order
};

// Solves the implicit update to cfg.tol. h may be negative (backward step);
// it must be nonzero. prev_step seeds the PreviousStep predictor and may be
// null. Throws NumericalError on non-convergence.
Vec step(const SkewGradientSystem& sys, const DiscreteGradient& dg,
         const SbarScheme& scheme, const Vec& x, double h,
         const SolverConfig& cfg, StepStats* stats = nullptr,
         const Vec* prev_step = nullptr);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;   // states[k] at times[k]; states[0] = x0
  std::vector<double> energies;
  std::vector<int> iterations;     // per accepted step
  std::vector<double> residuals;   // per accepted step
  std::string failure;             // empty when the run completed
  bool ok() const { return failure.empty(); }
};

// floor(t_end/h) full steps (with roundoff slack) plus, when h does not
// divide t_end, one shortened step so the trajectory ends exactly at t_end.
Trajectory integrate(const Problem& prob, const DiscreteGradient& dg,
                     const SbarScheme& scheme, double h, double t_end,
                     const SolverConfig& cfg);

enum class RefMethod { RK4, GL4 };

Vec reference_step(RefMethod method, const SkewGradientSystem& sys,
                   const Vec& x, double h, double tol = 1e-14);

Trajectory reference_integrate(RefMethod method, const Problem& prob, double h,
                               double t_end, double tol = 1e-14);

// CSV: header t,x1..xd,H,H_err with 17 significant digits per field.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

} // namespace dgflow
