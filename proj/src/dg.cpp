#include "dgflow/dg.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <mutex>

namespace dgflow {

const QuadRule& gauss_legendre_01(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  QuadRule r;
  r.node.resize(n);
  r.weight.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n over [-1,1], standard three-term recurrence.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p = 1.0, pm = 0.0;
      for (int k = 0; k < n; ++k) {
        double pk = ((2 * k + 1) * t * p - k * pm) / (k + 1);
        pm = p;
        p = pk;
      }
      dp = n * (t * p - pm) / (t * t - 1.0);
      double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    r.node[i] = 0.5 * (1.0 + t);
    r.weight[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

bool dg_is_symmetric(DgKind k) { return k != DgKind::ItohAbe; }
bool dg_has_jacobian(DgKind k) { return k != DgKind::GonzalezMidpoint; }

const char* dg_kind_name(DgKind k) {
  switch (k) {
    case DgKind::Avf: return "avf";
    case DgKind::ItohAbe: return "itoh-abe";
    case DgKind::SymItohAbe: return "sia";
    case DgKind::Furihata: return "furihata";
    case DgKind::GonzalezMidpoint: return "midpoint";
  }
  return "?";
}

DgKind dg_kind_from_name(const std::string& name) {
  for (DgKind k : {DgKind::Avf, DgKind::ItohAbe, DgKind::SymItohAbe,
                   DgKind::Furihata, DgKind::GonzalezMidpoint})
    if (name == dg_kind_name(k)) return k;
  throw ConfigError("unknown discrete gradient '" + name +
                    "' (choose from avf, itoh-abe, sia, furihata, midpoint)");
}

std::vector<std::string> dg_kind_names() {
  return {"avf", "itoh-abe", "sia", "furihata", "midpoint"};
}

Mat fd_jacobian2(const std::function<Vec(const Vec&, const Vec&)>& g,
                 const Vec& x, const Vec& y) {
  int d = static_cast<int>(y.size());
  Mat J(d, d);
  Vec yp = y, ym = y;
  for (int j = 0; j < d; ++j) {
    double step = 1e-6 * (1.0 + std::abs(y[j]));
    yp[j] = y[j] + step;
    ym[j] = y[j] - step;
    Vec gp = g(x, yp);
    Vec gm = g(x, ym);
    for (int i = 0; i < d; ++i) J(i, j) = (gp[i] - gm[i]) / (2.0 * step);
    yp[j] = y[j];
    ym[j] = y[j];
  }
  return J;
}

namespace {

// ---- averaged (AVF) kind --------------------------------------------------

void warn_inexact_quadrature(const std::string& sysname) {
  static std::once_flag flag;
  std::call_once(flag, [&] {
    std::cerr << "dgflow: H of '" << sysname
              << "' is not polynomial/separable; the averaged gradient uses "
                 "8-node quadrature, so conservation holds only to quadrature "
                 "error\n";
  });
}

int avf_nodes(const DiscreteGradient& dg, const SkewGradientSystem& sys) {
  if (dg.quadrature_nodes > 0) return dg.quadrature_nodes;
  if (sys.poly_H) return std::max(1, (sys.poly_H->total_degree() + 1) / 2);
  return 8;
}

// Divided difference of a 1-d potential, derivative-at-midpoint branch near
// coincidence.
double dd_scalar(const Scalar1D& t, double a, double b, double tol) {
  if (std::abs(b - a) <= tol) return t.d1(0.5 * (a + b));
  return (t.val(b) - t.val(a)) / (b - a);
}

// d/db of dd_scalar. The direct quotient sheds digits like eps/(b-a)^2, so
// the branch threshold sits well above the value branch's.
double dd_scalar_d2(const Scalar1D& t, double a, double b, double jtol) {
  double delta = b - a;
  if (std::abs(delta) <= jtol) return 0.5 * t.d2(0.5 * (a + b));
  return (t.d1(b) - (t.val(b) - t.val(a)) / delta) / delta;
}

Scalar1D log_scalar(double c) {
  Scalar1D s;
  s.val = [c](double u) { return c * std::log(u); };
  s.d1 = [c](double u) { return c / u; };
  s.d2 = [c](double u) { return -c / (u * u); };
  s.d3 = [c](double u) { return 2.0 * c / (u * u * u); };
  return s;
}

Vec avf_eval(const DiscreteGradient& dg, const SkewGradientSystem& sys,
             const Vec& x, const Vec& y) {
  int d = sys.dim;
  if (sys.closed_form_avf) return sys.closed_form_avf->value(x, y);
  if (sys.separable_H) {
    Vec g(d);
    for (int j = 0; j < d; ++j)
      g[j] = dd_scalar((*sys.separable_H)[j], x[j], y[j],
                       dg.coincidence_rel * (1.0 + std::abs(x[j])));
    return g;
  }
  if (sys.poly_H) {
    const QuadRule& q = gauss_legendre_01(avf_nodes(dg, sys));
    Vec g(d, 0.0);
    Vec pt(d);
    for (size_t i = 0; i < q.node.size(); ++i) {
      double xi = q.node[i];
      for (int j = 0; j < d; ++j) pt[j] = x[j] + xi * (y[j] - x[j]);
      Vec gp = sys.poly_H->gradient(pt);
      axpy(q.weight[i], gp, g);
    }
    for (auto [c, idx] : sys.log_H) {
      Scalar1D s = log_scalar(c);
      g[idx] += dd_scalar(s, x[idx], y[idx],
                          dg.coincidence_rel * (1.0 + std::abs(x[idx])));
    }
    return g;
  }
  warn_inexact_quadrature(sys.name);
  const QuadRule& q = gauss_legendre_01(avf_nodes(dg, sys));
  Vec g(d, 0.0);
  Vec pt(d);
  for (size_t i = 0; i < q.node.size(); ++i) {
    double xi = q.node[i];
    for (int j = 0; j < d; ++j) pt[j] = x[j] + xi * (y[j] - x[j]);
    axpy(q.weight[i], sys.grad(pt), g);
  }
  return g;
}

constexpr double kJacBranchRel = 1e-5;

Mat avf_jac2(const DiscreteGradient& dg, const SkewGradientSystem& sys,
             const Vec& x, const Vec& y) {
  int d = sys.dim;
  if (sys.closed_form_avf) {
    if (sys.closed_form_avf->jac2) return sys.closed_form_avf->jac2(x, y);
    return fd_jacobian2(sys.closed_form_avf->value, x, y);
  }
  if (sys.separable_H) {
    Mat J(d, d);
    for (int j = 0; j < d; ++j)
      J(j, j) = dd_scalar_d2((*sys.separable_H)[j], x[j], y[j],
                             kJacBranchRel * (1.0 + std::abs(x[j])));
    return J;
  }
  Mat J(d, d);
  const QuadRule& q = gauss_legendre_01(avf_nodes(dg, sys));
  Vec pt(d);
  for (size_t i = 0; i < q.node.size(); ++i) {
    double xi = q.node[i];
    for (int j = 0; j < d; ++j) pt[j] = x[j] + xi * (y[j] - x[j]);
    Mat Hm = sys.poly_H ? sys.poly_H->hessian(pt) : sys.hess(pt);
    double w = q.weight[i] * xi;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) J(r, c) += w * Hm(r, c);
  }
  if (sys.poly_H) {
    for (auto [c, idx] : sys.log_H) {
      Scalar1D s = log_scalar(c);
      J(idx, idx) += dd_scalar_d2(s, x[idx], y[idx],
                                  kJacBranchRel * (1.0 + std::abs(x[idx])));
    }
  }
  return J;
}

// ---- coordinate-increment (Itoh-Abe) kind ---------------------------------

struct IaOut {
  Vec g;
  Mat d2; // rows j, columns k: d alpha_j / d y_k
  Mat d1; // d alpha_j / d x_k
};

// Walks w_0 = x, w_j = (y_1..y_j, x_{j+1}..x_d), alpha_j the increment
// quotient along coordinate j. Near-coincidence rows switch to derivatives
// of H at w_{j-1}.
IaOut ia_core(const SkewGradientSystem& sys, const Vec& x, const Vec& y,
              double coincidence_rel, bool need_d2, bool need_d1) {
  int d = sys.dim;
  IaOut out;
  out.g.assign(d, 0.0);
  if (need_d2) out.d2 = Mat(d, d);
  if (need_d1) out.d1 = Mat(d, d);

  bool need_grads = need_d2 || need_d1;
  Vec w = x;
  double H_prev = sys.energy(w);
  Vec g_prev;
  if (need_grads) g_prev = sys.grad(w);

  for (int j = 0; j < d; ++j) {
    double delta = y[j] - x[j];
    double tol = coincidence_rel * (1.0 + std::abs(x[j]));
    double jtol = kJacBranchRel * (1.0 + std::abs(x[j]));
    Vec w_prevstate = w; // w_{j-1}, only needed for the branch hessian
    w[j] = y[j];
    double H_cur = sys.energy(w);
    Vec g_cur;
    if (need_grads) g_cur = sys.grad(w);

    double quotient = 0.0;
    bool coincident_val = std::abs(delta) <= tol;
    if (!coincident_val) quotient = (H_cur - H_prev) / delta;
    if (coincident_val)
      out.g[j] = need_grads ? g_prev[j] : sys.grad(w_prevstate)[j];
    else
      out.g[j] = quotient;

    if (need_grads) {
      bool coincident_jac = std::abs(delta) <= jtol;
      Mat Hb;
      if (coincident_jac) Hb = sys.hess(w_prevstate);
      if (need_d2) {
        for (int k = 0; k < j; ++k)
          out.d2(j, k) = coincident_jac ? Hb(j, k)
                                        : (g_cur[k] - g_prev[k]) / delta;
        out.d2(j, j) = coincident_jac ? 0.5 * Hb(j, j)
                                      : (g_cur[j] - quotient) / delta;
      }
      if (need_d1) {
        for (int k = j + 1; k < d; ++k)
          out.d1(j, k) = coincident_jac ? Hb(j, k)
                                        : (g_cur[k] - g_prev[k]) / delta;
        out.d1(j, j) = coincident_jac ? 0.5 * Hb(j, j)
                                      : (quotient - g_prev[j]) / delta;
      }
    }

    H_prev = H_cur;
    g_prev = std::move(g_cur);
  }
  return out;
}

// ---- product-rule (Furihata) kind ------------------------------------------

// For one monomial c * prod_k u_k^{p_k}: per active coordinate j,
//   gbar_j += c * DD_j * (prefix(x) + prefix(y))/2 * prod_{k>j} mid_k
// where DD_j = sum_r y^r x^{p-1-r} (the stable power divided difference) and
// mid_k averages the k-th factor. Telescopes to the secant identity term by
// term.
void furihata_monomial(const Monomial& m, const Vec& x, const Vec& y, Vec* g,
                       Mat* J) {
  int d = static_cast<int>(x.size());
  std::vector<int> idx;
  for (int k = 0; k < d; ++k)
    if (m.p[k] > 0) idx.push_back(k);
  if (idx.empty()) return;
  int nf = static_cast<int>(idx.size());

  std::vector<double> fx(nf), fy(nf), dfy(nf);
  for (int t = 0; t < nf; ++t) {
    int k = idx[t];
    fx[t] = ipow(x[k], m.p[k]);
    fy[t] = ipow(y[k], m.p[k]);
    dfy[t] = m.p[k] * ipow(y[k], m.p[k] - 1);
  }

  for (int t = 0; t < nf; ++t) {
    int j = idx[t];
    int p = m.p[j];
    double dd = 0.0, ddp = 0.0;
    for (int r = 0; r < p; ++r) {
      double term = ipow(y[j], r) * ipow(x[j], p - 1 - r);
      dd += term;
      if (r >= 1) ddp += r * ipow(y[j], r - 1) * ipow(x[j], p - 1 - r);
    }
    double prex = 1.0, prey = 1.0;
    for (int s = 0; s < t; ++s) {
      prex *= fx[s];
      prey *= fy[s];
    }
    double pre = 0.5 * (prex + prey);
    double suf = 1.0;
    for (int s = t + 1; s < nf; ++s) suf *= 0.5 * (fx[s] + fy[s]);

    if (g) (*g)[j] += m.c * dd * pre * suf;
    if (J) {
      (*J)(j, j) += m.c * ddp * pre * suf;
      for (int s = 0; s < t; ++s) {
        double dpre = 0.5 * dfy[s];
        for (int u = 0; u < t; ++u)
          if (u != s) dpre *= fy[u];
        (*J)(j, idx[s]) += m.c * dd * dpre * suf;
      }
      for (int s = t + 1; s < nf; ++s) {
        double dsuf = 0.5 * dfy[s];
        for (int u = t + 1; u < nf; ++u)
          if (u != s) dsuf *= 0.5 * (fx[u] + fy[u]);
        (*J)(j, idx[s]) += m.c * dd * pre * dsuf;
      }
    }
  }
}

void furihata_accumulate(const DiscreteGradient& dg,
                         const SkewGradientSystem& sys, const Vec& x,
                         const Vec& y, Vec* g, Mat* J) {
  if (sys.poly_H) {
    for (const Monomial& m : sys.poly_H->terms) furihata_monomial(m, x, y, g, J);
    for (auto [c, idx] : sys.log_H) {
      Scalar1D s = log_scalar(c);
      if (g)
        (*g)[idx] += dd_scalar(s, x[idx], y[idx],
                               dg.coincidence_rel * (1.0 + std::abs(x[idx])));
      if (J)
        (*J)(idx, idx) += dd_scalar_d2(s, x[idx], y[idx],
                                       kJacBranchRel * (1.0 + std::abs(x[idx])));
    }
    return;
  }
  if (sys.separable_H) {
    for (int j = 0; j < sys.dim; ++j) {
      const Scalar1D& s = (*sys.separable_H)[j];
      if (g)
        (*g)[j] = dd_scalar(s, x[j], y[j],
                            dg.coincidence_rel * (1.0 + std::abs(x[j])));
      if (J)
        (*J)(j, j) = dd_scalar_d2(s, x[j], y[j],
                                  kJacBranchRel * (1.0 + std::abs(x[j])));
    }
    return;
  }
  throw ConfigError("the product-rule discrete gradient needs H in product "
                    "form (polynomial monomials, optional log terms, or "
                    "separable 1-d terms); '" +
                    sys.name + "' provides neither");
}

// ---- midpoint kind ---------------------------------------------------------

Vec midpoint_eval(const SkewGradientSystem& sys, const Vec& x, const Vec& y) {
  int d = sys.dim;
  Vec xb(d);
  for (int j = 0; j < d; ++j) xb[j] = 0.5 * (x[j] + y[j]);
  Vec g = sys.grad(xb);
  Vec delta = y - x;
  double dd = dot(delta, delta);
  if (dd == 0.0) return g;
  double corr = (sys.energy(y) - sys.energy(x) - dot(g, delta)) / dd;
  axpy(corr, delta, g);
  return g;
}

} // namespace

Vec dg_eval(const DiscreteGradient& dg, const SkewGradientSystem& sys,
            const Vec& x, const Vec& y) {
  sys.check_state(x);
  sys.check_state(y);
  switch (dg.kind) {
    case DgKind::Avf:
      return avf_eval(dg, sys, x, y);
    case DgKind::ItohAbe:
      return ia_core(sys, x, y, dg.coincidence_rel, false, false).g;
    case DgKind::SymItohAbe: {
      Vec a = ia_core(sys, x, y, dg.coincidence_rel, false, false).g;
      Vec b = ia_core(sys, y, x, dg.coincidence_rel, false, false).g;
      Vec g(sys.dim);
      for (int j = 0; j < sys.dim; ++j) g[j] = 0.5 * (a[j] + b[j]);
      return g;
    }
    case DgKind::Furihata: {
      Vec g(sys.dim, 0.0);
      furihata_accumulate(dg, sys, x, y, &g, nullptr);
      return g;
    }
    case DgKind::GonzalezMidpoint:
      return midpoint_eval(sys, x, y);
  }
  throw ConfigError("unreachable discrete gradient kind");
}

Mat dg_jacobian2(const DiscreteGradient& dg, const SkewGradientSystem& sys,
                 const Vec& x, const Vec& y) {
  sys.check_state(x);
  sys.check_state(y);
  switch (dg.kind) {
    case DgKind::Avf:
      return avf_jac2(dg, sys, x, y);
    case DgKind::ItohAbe:
      return ia_core(sys, x, y, dg.coincidence_rel, true, false).d2;
    case DgKind::SymItohAbe: {
      // D2 of (G(x,y)+G(y,x))/2 needs D2 of the first call and D1 of the
      // second, both at swapped arguments.
      Mat a = ia_core(sys, x, y, dg.coincidence_rel, true, false).d2;
      Mat b = ia_core(sys, y, x, dg.coincidence_rel, false, true).d1;
      return 0.5 * (a + b);
    }
    case DgKind::Furihata: {
      Mat J(sys.dim, sys.dim);
      furihata_accumulate(dg, sys, x, y, nullptr, &J);
      return J;
    }
    case DgKind::GonzalezMidpoint:
      throw ConfigError("the midpoint discrete gradient has no usable "
                        "second-argument Jacobian (singular at y=x); use a "
                        "fixed-point solve instead");
  }
  throw ConfigError("unreachable discrete gradient kind");
}

Mat dg_q(const DiscreteGradient& dg, const SkewGradientSystem& sys,
         const Vec& x, const Vec& y) {
  Mat J = dg_jacobian2(dg, sys, x, y);
  int d = J.rows;
  Mat Q(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) Q(i, j) = 0.5 * (J(j, i) - J(i, j));
  return Q;
}

} // namespace dgflow
