#include "dgflow/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "dgflow/errors.hpp"

namespace dgflow {

RefKind ref_kind_from_name(const std::string& name) {
  if (name == "gl4-fine") return RefKind::GL4Fine;
  if (name == "scheme-fine") return RefKind::SchemeFine;
  throw ConfigError("unknown reference kind '" + name +
                    "' (expected gl4-fine or scheme-fine)");
}

const char* ref_kind_name(RefKind k) {
  return k == RefKind::GL4Fine ? "gl4-fine" : "scheme-fine";
}

int bench_threads() {
  const char* env = std::getenv("DGFLOW_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    std::fprintf(stderr, "dgflow: ignoring invalid DGFLOW_THREADS=%s\n", env);
    return 1;
  }
  return static_cast<int>(v > 64 ? 64 : v);
}

namespace {

struct RefSolution {
  Vec final_state;
  double accuracy = 0; // distance to the half-resolution run
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Fine solutions are reused across studies: an order sweep runs many schemes
// against the same problem, horizon and step ladder.
RefSolution reference_solution(const Problem& prob, const SbarScheme* scheme,
                               const DiscreteGradient* dg, double h_ref,
                               double t_end, const SolverConfig& cfg) {
  std::ostringstream key;
  key << prob.name << '|' << prob.system.dim << '|';
  for (double c : prob.x0) key << fmt(c) << ',';
  key << '|' << fmt(h_ref) << '|' << fmt(t_end) << '|';
  if (scheme)
    key << scheme->name << '|' << dg_kind_name(dg->kind);
  else
    key << "gl4";

  static std::mutex cache_mu;
  static std::map<std::string, RefSolution> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
  }

  auto run = [&](double h) {
    Trajectory t;
    if (scheme) {
      SolverConfig fine = cfg;
      fine.tol = 1e-14;
      t = integrate(prob, *dg, *scheme, h, t_end, fine);
    } else {
      t = reference_integrate(RefMethod::GL4, prob, h, t_end, 1e-14);
    }
    if (!t.ok())
      throw NumericalError("reference run failed at h=" + fmt(h) + ": " +
                           t.failure);
    return t.states.back();
  };

  RefSolution sol;
  sol.final_state = run(h_ref);
  Vec coarse = run(2.0 * h_ref);
  sol.accuracy = norm_inf(sol.final_state - coarse);

  std::lock_guard<std::mutex> lock(cache_mu);
  cache.emplace(key.str(), sol);
  return sol;
}

// slope of log(err) vs log(h) by least squares
double ls_slope(const std::vector<double>& h, const std::vector<double>& e) {
  size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double d = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / d;
}

} // namespace

ConvergenceReport run_convergence(const Problem& prob,
                                  const SbarScheme& scheme,
                                  const DiscreteGradient& dg,
                                  const std::vector<double>& h_list,
                                  double t_end, RefKind ref,
                                  const SolverConfig& cfg) {
  if (h_list.empty()) throw ConfigError("convergence study needs step sizes");
  for (size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0))
      throw ConfigError("step sizes must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw ConfigError("step sizes must be strictly decreasing");
  }
  if (!(t_end > 0)) throw ConfigError("t_end must be positive");

  double h_ref = h_list.back() / 100.0;

  ConvergenceReport rep;
  rep.problem = prob.name;
  rep.scheme = scheme.name;
  rep.dg = dg_kind_name(dg.kind);
  {
    std::ostringstream d;
    d << ref_kind_name(ref) << " h_ref=" << fmt(h_ref) << " tol=1e-14";
    rep.reference = d.str();
  }

  const SbarScheme* ref_scheme = ref == RefKind::SchemeFine ? &scheme : nullptr;
  const DiscreteGradient* ref_dg = ref == RefKind::SchemeFine ? &dg : nullptr;
  RefSolution sol =
      reference_solution(prob, ref_scheme, ref_dg, h_ref, t_end, cfg);
  rep.reference_accuracy = sol.accuracy;

  rep.points.resize(h_list.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < h_list.size();
         i = next.fetch_add(1)) {
      ConvergencePoint& p = rep.points[i];
      // Snap the step so it divides t_end; a non-uniform tail step would
      // pollute the log-log fit. The report carries the step actually used.
      long long n =
          static_cast<long long>(std::ceil(t_end / h_list[i] - 1e-9));
      if (n < 1) n = 1;
      double h_eff = t_end / static_cast<double>(n);
      p.h = h_eff;
      try {
        Trajectory t = integrate(prob, dg, scheme, h_eff, t_end, cfg);
        if (!t.ok()) {
          p.failed = true;
          p.failure = t.failure;
          continue;
        }
        p.error = norm_inf(t.states.back() - sol.final_state);
        if (!std::isfinite(p.error)) {
          p.failed = true;
          p.failure = "non-finite error";
        }
      } catch (const std::exception& e) {
        p.failed = true;
        p.failure = e.what();
      }
    }
  };
  int nthreads = bench_threads();
  if (nthreads <= 1 || h_list.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    size_t count = std::min<size_t>(nthreads, h_list.size());
    for (size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> hs, es;
  for (const ConvergencePoint& p : rep.points) {
    if (p.failed || !(p.error > 0)) continue;
    if (p.error <= 100.0 * rep.reference_accuracy) continue;
    hs.push_back(p.h);
    es.push_back(p.error);
  }
  rep.points_in_fit = static_cast<int>(hs.size());
  if (hs.size() >= 3) {
    rep.fitted_slope = ls_slope(hs, es);
    rep.has_slope = true;
  }
  return rep;
}

DriftSeries energy_drift(const Trajectory& traj) {
  if (traj.times.empty())
    throw ConfigError("energy drift needs a non-empty trajectory");
  DriftSeries d;
  d.t = traj.times;
  d.h_err.reserve(traj.energies.size());
  double h0 = traj.energies.front();
  for (double e : traj.energies) {
    double drift = e - h0;
    d.h_err.push_back(drift);
    if (std::fabs(drift) > d.max_drift) d.max_drift = std::fabs(drift);
  }
  return d;
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string out = "h,error,slope_running\n";
  std::vector<double> hs, es;
  for (const ConvergencePoint& p : rep.points) {
    out += fmt(p.h);
    out += ',';
    out += p.failed ? "nan" : fmt(p.error);
    bool usable = !p.failed && p.error > 0 &&
                  p.error > 100.0 * rep.reference_accuracy;
    if (usable) {
      hs.push_back(p.h);
      es.push_back(p.error);
    }
    out += ',';
    out += hs.size() >= 2 ? fmt(ls_slope(hs, es)) : "nan";
    out += '\n';
  }
  return out;
}

void write_convergence_csv(const std::string& path,
                           const ConvergenceReport& rep) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file " + path);
  f << convergence_csv(rep);
}

std::string drift_csv(const DriftSeries& d) {
  std::string out = "t,H_err\n";
  for (size_t i = 0; i < d.t.size(); ++i) {
    out += fmt(d.t[i]);
    out += ',';
    out += fmt(d.h_err[i]);
    out += '\n';
  }
  return out;
}

void write_drift_csv(const std::string& path, const DriftSeries& d) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file " + path);
  f << drift_csv(d);
}

std::string convergence_plot_script(const std::string& csv_path,
                                    const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set logscale xy\n";
  s += "set xlabel 'h'\n";
  s += "set ylabel 'global error at t_end'\n";
  s += "set key top left\n";
  s += "set grid\n";
  s += "set title '" + title + "'\n";
  s += "plot '" + csv_path + "' using 1:2 skip 1 with linespoints "
       "title 'error', \\\n";
  s += "  for [p=1:6] '" + csv_path +
       "' using 1:(column(1)**p) skip 1 with lines dashtype 2 "
       "title sprintf('order %d', p)\n";
  return s;
}

std::string drift_plot_script(const std::string& csv_path,
                              const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set xlabel 't'\n";
  s += "set ylabel 'H(t) - H(0)'\n";
  s += "set grid\n";
  s += "set title '" + title + "'\n";
  s += "plot '" + csv_path + "' using 1:2 skip 1 with lines title 'drift'\n";
  return s;
}

} // namespace dgflow
