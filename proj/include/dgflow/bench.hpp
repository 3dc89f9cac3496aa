#pragma once
// Convergence studies and energy-drift measurement. A study integrates one
// (problem, scheme, gradient) triple over a ladder of step sizes, measures
// the final-state error against a fine reference, and fits the order as the
// least-squares slope in log-log coordinates.

#include <string>
#include <vector>

#include "dgflow/dg.hpp"
#include "dgflow/integrator.hpp"
#include "dgflow/sbar.hpp"
#include "dgflow/system.hpp"

namespace dgflow {

// GL4Fine: Gauss-Legendre reference at h_ref = min(h)/100, Newton tol 1e-14.
// SchemeFine: the scheme under study at the same fine step, for
// self-referenced studies of methods whose exact flow is expensive.
enum class RefKind { GL4Fine, SchemeFine };

RefKind ref_kind_from_name(const std::string& name);
const char* ref_kind_name(RefKind k);

struct ConvergencePoint {
  double h = 0;
  double error = 0;      // ||x_N(h) - x_ref(t_end)||_inf
  bool failed = false;   // integration failed; error meaningless
  std::string failure;
};

struct ConvergenceReport {
  std::string problem;
  std::string scheme;
  std::string dg;
  std::string reference;        // human-readable reference description
  double reference_accuracy = 0; // ||x_ref(h_ref) - x_ref(2 h_ref)||_inf
  std::vector<ConvergencePoint> points; // in the declared h order
  // Least-squares slope of log(error) vs log(h) over the usable points:
  // successful, finite, and above 100x the reference accuracy estimate.
  // Only computed when at least 3 points qualify.
  double fitted_slope = 0;
  bool has_slope = false;
  int points_in_fit = 0;
};

// h_list must be positive and strictly decreasing. Per-h integration
// failures mark the point failed instead of aborting the study; a failed
// reference run throws NumericalError. Honors DGFLOW_THREADS for the per-h
// runs; results always assemble in the declared order.
ConvergenceReport run_convergence(const Problem& prob,
                                  const SbarScheme& scheme,
                                  const DiscreteGradient& dg,
                                  const std::vector<double>& h_list,
                                  double t_end,
                                  RefKind ref = RefKind::GL4Fine,
                                  const SolverConfig& cfg = SolverConfig());

struct DriftSeries {
  std::vector<double> t;
  std::vector<double> h_err; // H(t_k) - H(t_0)
  double max_drift = 0;
};

// Drift of the recorded energies relative to the initial one. A length-1
// trajectory yields the single entry (t_0, 0).
DriftSeries energy_drift(const Trajectory& traj);

// CSV emitters. Headers: convergence "h,error,slope_running" where
// slope_running is the fit over the usable points seen so far (nan below 2);
// drift "t,H_err". 17 significant digits; identical inputs give identical
// bytes.
std::string convergence_csv(const ConvergenceReport& rep);
void write_convergence_csv(const std::string& path,
                           const ConvergenceReport& rep);
std::string drift_csv(const DriftSeries& d);
void write_drift_csv(const std::string& path, const DriftSeries& d);

// gnuplot scripts referencing an already-written CSV; plain text only, never
// executed by this library.
std::string convergence_plot_script(const std::string& csv_path,
                                    const std::string& title);
std::string drift_plot_script(const std::string& csv_path,
                              const std::string& title);

// DGFLOW_THREADS clamped to [1, 64]; unset, empty or unparsable gives 1.
int bench_threads();

} // namespace dgflow
