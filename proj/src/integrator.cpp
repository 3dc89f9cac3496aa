#include "dgflow/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dgflow/errors.hpp"

namespace dgflow {

SolveStrategy strategy_from_name(const std::string& name) {
  if (name == "newton") return SolveStrategy::Newton;
  if (name == "quasi-newton") return SolveStrategy::QuasiNewtonFrozenSbar;
  if (name == "fixed-point") return SolveStrategy::FixedPoint;
  throw ConfigError("unknown strategy '" + name +
                    "' (choose newton, quasi-newton or fixed-point)");
}

const char* strategy_name(SolveStrategy s) {
  switch (s) {
    case SolveStrategy::Newton: return "newton";
    case SolveStrategy::QuasiNewtonFrozenSbar: return "quasi-newton";
    case SolveStrategy::FixedPoint: return "fixed-point";
  }
  return "?";
}

namespace {

// f evaluated with central differences; only feeds Newton matrices, so
// truncation error here costs iterations, not accuracy.
Mat fd_field_jacobian(const SkewGradientSystem& sys, const Vec& x) {
  int d = sys.dim;
  Mat j(d, d);
  Vec xp = x, xm = x;
  for (int k = 0; k < d; ++k) {
    double dk = 1e-6 * (1.0 + std::fabs(x[k]));
    xp[k] = x[k] + dk;
    xm[k] = x[k] - dk;
    Vec fp = eval_field(sys, xp);
    Vec fm = eval_field(sys, xm);
    for (int i = 0; i < d; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * dk);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return j;
}

} // namespace

Vec step(const SkewGradientSystem& sys, const DiscreteGradient& dg,
         const SbarScheme& scheme, const Vec& x, double h,
         const SolverConfig& cfg, StepStats* stats, const Vec* prev_step) {
  if (h == 0.0 || !std::isfinite(h)) throw ConfigError("step size must be a nonzero finite number");
  if (cfg.tol <= 0.0) throw ConfigError("solver tolerance must be positive");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  int d = sys.dim;

  Vec predictor;
  if (cfg.predictor == Predictor::PreviousStep && prev_step) {
    // extrapolate through the previous accepted state
    predictor = x;
    for (int i = 0; i < d; ++i) predictor[i] += x[i] - (*prev_step)[i];
  } else {
    predictor = x;
    axpy(h, eval_field(sys, x), predictor);
  }

  SolveStrategy strat = cfg.strategy;
  int budget = cfg.max_iter;
  if (!dg_has_jacobian(dg.kind) && strat != SolveStrategy::FixedPoint) {
    strat = SolveStrategy::FixedPoint;
    budget = cfg.max_iter * 4;
  }

  // explicit schemes cannot see the iterate, so their Sbar is a constant of
  // the step
  Mat sbar_fixed;
  if (!scheme.implicit) sbar_fixed = eval_sbar(scheme, sys, dg, x, x, h);

  Mat frozen_jac; // quasi-Newton: built once from the predictor
  Vec xh = predictor;
  double res = std::numeric_limits<double>::infinity();
  double prev_res = res;
  int grow = 0;
  bool halved = false;
  int iters = 0;

  while (iters < budget) {
    ++iters;
    Vec g;
    try {
      if (scheme.implicit) sbar_fixed = eval_sbar(scheme, sys, dg, x, xh, h);
      g = dg_eval(dg, sys, x, xh);
    } catch (const DomainError&) {
      // Trial iterate (often the predictor) left the domain of H; back it
      // off toward the in-domain current state and spend an iteration.
      bool moved = false;
      for (int i = 0; i < d; ++i) {
        xh[i] = 0.5 * (xh[i] + x[i]);
        if (xh[i] != x[i]) moved = true;
      }
      if (!moved) throw;
      prev_res = std::numeric_limits<double>::infinity();
      continue;
    }
    const Mat& sb = sbar_fixed;
    Vec sg = matvec(sb, g);
    Vec fres(d);
    for (int i = 0; i < d; ++i) fres[i] = xh[i] - x[i] - h * sg[i];
    res = norm_inf(fres);
    if (stats) stats->history.push_back(res);

    bool bad = !std::isfinite(res);
    if (!bad && res <= cfg.tol) break;
    // Growth within an order of magnitude of tol is round-off jitter near a
    // discrete-gradient noise floor, not divergence; let the budget decide.
    if (bad || (res > prev_res && res > 10.0 * cfg.tol)) {
      if (bad || ++grow >= 3) {
        if (halved)
          throw NumericalError("implicit step diverged (last residual " +
                               std::to_string(res) + " after " +
                               std::to_string(iters) + " iterations)");
        for (int i = 0; i < d; ++i) xh[i] = 0.5 * (xh[i] + predictor[i]);
        halved = true;
        grow = 0;
        prev_res = std::numeric_limits<double>::infinity();
        continue;
      }
    } else {
      grow = 0;
    }
    prev_res = res;

    if (strat == SolveStrategy::FixedPoint) {
      for (int i = 0; i < d; ++i) xh[i] -= fres[i];
    } else {
      if (strat == SolveStrategy::Newton || frozen_jac.rows == 0) {
        Mat d2 = dg_jacobian2(dg, sys, x, xh);
        Mat j = Mat::identity(d);
        Mat sd = sb * d2;
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k) j(i, k) -= h * sd(i, k);
        if (strat == SolveStrategy::QuasiNewtonFrozenSbar) frozen_jac = j;
        Vec rhs(d);
        for (int i = 0; i < d; ++i) rhs[i] = -fres[i];
        Vec delta = lu_solve(std::move(j), std::move(rhs));
        xh += delta;
      } else {
        Vec rhs(d);
        for (int i = 0; i < d; ++i) rhs[i] = -fres[i];
        Vec delta = lu_solve(frozen_jac, std::move(rhs));
        xh += delta;
      }
    }
  }

  if (!(res <= cfg.tol))
    throw NumericalError("implicit step did not converge in " +
                         std::to_string(budget) + " iterations (residual " +
                         std::to_string(res) + ", tol " +
                         std::to_string(cfg.tol) + ")");
  if (stats) {
    stats->iterations = iters;
    stats->residual = res;
  }
  return xh;
}

namespace {

// Full steps of size h, plus a shortened tail step when h does not divide
// t_end, so trajectories always end exactly at t_end.
struct StepPlan {
  long long full = 0;
  double tail = 0.0;
};

StepPlan plan_steps(double t_end, double h) {
  StepPlan p;
  p.full = static_cast<long long>(std::floor(t_end / h + 1e-9));
  double tail = t_end - static_cast<double>(p.full) * h;
  if (tail > 1e-9 * std::max(1.0, std::fabs(t_end))) p.tail = tail;
  return p;
}

} // namespace

Trajectory integrate(const Problem& prob, const DiscreteGradient& dg,
                     const SbarScheme& scheme, double h, double t_end,
                     const SolverConfig& cfg) {
  if (h <= 0.0) throw ConfigError("integration step must be positive");
  if (t_end <= 0.0) throw ConfigError("t_end must be positive");
  StepPlan plan = plan_steps(t_end, h);

  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(prob.x0);
  tr.energies.push_back(eval_energy(prob.system, prob.x0));
  Vec x = prob.x0;
  Vec prev;
  auto advance = [&](long long k, double hk, double tk) {
    StepStats st;
    Vec xn;
    try {
      xn = step(prob.system, dg, scheme, x, hk, cfg, &st,
                prev.empty() ? nullptr : &prev);
    } catch (const NumericalError& e) {
      tr.failure = "step " + std::to_string(k) + " (t=" + std::to_string(tk) +
                   "): " + e.what();
      return false;
    }
    prev = std::move(x);
    x = std::move(xn);
    tr.times.push_back(tk);
    tr.states.push_back(x);
    tr.energies.push_back(eval_energy(prob.system, x));
    tr.iterations.push_back(st.iterations);
    tr.residuals.push_back(st.residual);
    return true;
  };
  for (long long k = 1; k <= plan.full; ++k)
    if (!advance(k, h, static_cast<double>(k) * h)) return tr;
  if (plan.tail > 0.0) advance(plan.full + 1, plan.tail, t_end);
  return tr;
}

Vec reference_step(RefMethod method, const SkewGradientSystem& sys,
                   const Vec& x, double h, double tol) {
  if (h == 0.0) throw ConfigError("step size must be nonzero");
  int d = sys.dim;
  if (method == RefMethod::RK4) {
    Vec k1 = eval_field(sys, x);
    Vec y = x;
    axpy(0.5 * h, k1, y);
    Vec k2 = eval_field(sys, y);
    y = x;
    axpy(0.5 * h, k2, y);
    Vec k3 = eval_field(sys, y);
    y = x;
    axpy(h, k3, y);
    Vec k4 = eval_field(sys, y);
    Vec out = x;
    for (int i = 0; i < d; ++i)
      out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

  // 2-stage Gauss-Legendre, full Newton on the stacked stage equations
  const double s3 = std::sqrt(3.0);
  const double a11 = 0.25, a12 = 0.25 - s3 / 6.0;
  const double a21 = 0.25 + s3 / 6.0, a22 = 0.25;
  Vec k1 = eval_field(sys, x);
  Vec k2 = k1;
  const int kmax = 100;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kmax; ++it) {
    Vec y1 = x, y2 = x;
    for (int i = 0; i < d; ++i) {
      y1[i] += h * (a11 * k1[i] + a12 * k2[i]);
      y2[i] += h * (a21 * k1[i] + a22 * k2[i]);
    }
    Vec f1 = eval_field(sys, y1);
    Vec f2 = eval_field(sys, y2);
    Vec r(2 * d);
    for (int i = 0; i < d; ++i) {
      r[i] = k1[i] - f1[i];
      r[d + i] = k2[i] - f2[i];
    }
    res = norm_inf(r);
    if (res <= tol) break;
    Mat j1 = fd_field_jacobian(sys, y1);
    Mat j2 = fd_field_jacobian(sys, y2);
    Mat big = Mat::identity(2 * d);
    for (int i = 0; i < d; ++i)
      for (int c = 0; c < d; ++c) {
        big(i, c) -= h * a11 * j1(i, c);
        big(i, d + c) -= h * a12 * j1(i, c);
        big(d + i, c) -= h * a21 * j2(i, c);
        big(d + i, d + c) -= h * a22 * j2(i, c);
      }
    Vec rhs(2 * d);
    for (int i = 0; i < 2 * d; ++i) rhs[i] = -r[i];
    Vec delta = lu_solve(std::move(big), std::move(rhs));
    for (int i = 0; i < d; ++i) {
      k1[i] += delta[i];
      k2[i] += delta[d + i];
    }
  }
  if (!(res <= tol))
    throw NumericalError("Gauss-Legendre stage solve did not converge "
                         "(residual " + std::to_string(res) + ")");
  Vec out = x;
  for (int i = 0; i < d; ++i) out[i] += 0.5 * h * (k1[i] + k2[i]);
  return out;
}

Trajectory reference_integrate(RefMethod method, const Problem& prob, double h,
                               double t_end, double tol) {
  if (h <= 0.0) throw ConfigError("integration step must be positive");
  if (t_end <= 0.0) throw ConfigError("t_end must be positive");
  StepPlan plan = plan_steps(t_end, h);
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(prob.x0);
  tr.energies.push_back(eval_energy(prob.system, prob.x0));
  Vec x = prob.x0;
  auto advance = [&](long long k, double hk, double tk) {
    try {
      x = reference_step(method, prob.system, x, hk, tol);
    } catch (const NumericalError& e) {
      tr.failure = "step " + std::to_string(k) + ": " + e.what();
      return false;
    }
    tr.times.push_back(tk);
    tr.states.push_back(x);
    tr.energies.push_back(eval_energy(prob.system, x));
    return true;
  };
  for (long long k = 1; k <= plan.full; ++k)
    if (!advance(k, h, static_cast<double>(k) * h)) return tr;
  if (plan.tail > 0.0) advance(plan.full + 1, plan.tail, t_end);
  return tr;
}

std::string trajectory_csv(const Trajectory& traj) {
  if (traj.states.empty()) throw ConfigError("empty trajectory");
  int d = static_cast<int>(traj.states[0].size());
  std::string out = "t";
  for (int i = 1; i <= d; ++i) out += ",x" + std::to_string(i);
  out += ",H,H_err\n";
  double h0 = traj.energies[0];
  char buf[40];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out += buf;
  };
  for (size_t k = 0; k < traj.states.size(); ++k) {
    put(traj.times[k], ',');
    for (int i = 0; i < d; ++i) put(traj.states[k][i], ',');
    put(traj.energies[k], ',');
    put(traj.energies[k] - h0, '\n');
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file " + path);
  out << trajectory_csv(traj);
}

} // namespace dgflow
