#include "dgflow/system.hpp"

#include <cmath>

namespace dgflow {

void SkewGradientSystem::check_state(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim) throw ConfigError("state dimension mismatch for system " + name);
  if (domain) {
    std::string why;
    if (!domain(x, &why)) throw DomainError("state outside domain of " + name + ": " + why);
  }
}

double eval_energy(const SkewGradientSystem& sys, const Vec& x) {
  sys.check_state(x);
  return sys.energy(x);
}

Vec eval_field(const SkewGradientSystem& sys, const Vec& x) {
  sys.check_state(x);
  return matvec(sys.skew(x), sys.grad(x));
}

Mat default_skew(const Vec& f, const Vec& g) {
  double gg = dot(g, g);
  if (gg == 0.0) throw NumericalError("default_skew: grad H vanishes (singular point)");
  Mat s = outer(f, g) - outer(g, f);
  for (double& v : s.a) v /= gg;
  return s;
}

SkewGradientSystem system_from_field(int dim, std::function<Vec(const Vec&)> f,
                                     std::function<double(const Vec&)> H,
                                     std::function<Vec(const Vec&)> grad) {
  SkewGradientSystem sys;
  sys.dim = dim;
  sys.name = "from-field";
  sys.energy = std::move(H);
  sys.grad = std::move(grad);
  auto fld = std::move(f);
  auto g = sys.grad;
  sys.skew = [fld, g](const Vec& x) { return default_skew(fld(x), g(x)); };
  sys.constant_S = false;
  auto gr = sys.grad;
  sys.hess = [gr](const Vec& x) { return fd_hessian(gr, x); };
  return sys;
}

Mat fd_hessian(const std::function<Vec(const Vec&)>& grad, const Vec& x) {
  int d = static_cast<int>(x.size());
  Mat h(d, d);
  Vec xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    // cbrt(machine eps): the central-difference optimum, where truncation
    // O(eps^2) and rounding O(ulp/eps) balance near 1e-11
    double eps = std::cbrt(2.2e-16) * (1.0 + std::fabs(x[j]));
    xp[j] = x[j] + eps;
    xm[j] = x[j] - eps;
    Vec gp = grad(xp), gm = grad(xm);
    for (int i = 0; i < d; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * eps);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  // enforce symmetry lost to rounding
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double v = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = v;
      h(j, i) = v;
    }
  return h;
}

static Monomial mono(double c, std::initializer_list<int> pows) {
  Monomial m;
  m.c = c;
  int j = 0;
  for (int p : pows) m.p[j++] = static_cast<std::uint8_t>(p);
  return m;
}

static Problem make_henon_heiles() {
  // H = (q1^2 + q2^2 + p1^2 + p2^2)/2 + q1^2 q2 - q2^3/3, canonical S.
  Polynomial H(4);
  H.terms = {
      mono(0.5, {2, 0, 0, 0}), mono(0.5, {0, 2, 0, 0}), mono(0.5, {0, 0, 2, 0}),
      mono(0.5, {0, 0, 0, 2}), mono(1.0, {2, 1, 0, 0}), mono(-1.0 / 3.0, {0, 3, 0, 0})};

  SkewGradientSystem sys;
  sys.dim = 4;
  sys.name = "henon-heiles";
  sys.poly_H = H;
  sys.energy = [H](const Vec& x) { return H.eval(x); };
  sys.grad = [H](const Vec& x) { return H.gradient(x); };
  sys.hess = [H](const Vec& x) { return H.hessian(x); };
  Mat S(4, 4);
  S(0, 2) = 1.0; S(1, 3) = 1.0; S(2, 0) = -1.0; S(3, 1) = -1.0;
  sys.skew = [S](const Vec&) { return S; };
  sys.constant_S = true;
  return Problem{"henon-heiles", sys, {0.1, -0.5, 0.0, 0.0}};
}

static Problem make_lotka_volterra() {
  // H = 2 x1 + x2 + 2 x3 + ln x2 - 2 ln x3 on the positive octant,
  // S(x) = [[0, -x1 x2, x1 x3], [x1 x2, 0, -2 x2 x3], [-x1 x3, 2 x2 x3, 0]] / 2.
  SkewGradientSystem sys;
  sys.dim = 3;
  sys.name = "lotka-volterra";
  sys.energy = [](const Vec& x) { return 2.0 * x[0] + x[1] + 2.0 * x[2] + std::log(x[1]) - 2.0 * std::log(x[2]); };
  sys.grad = [](const Vec& x) { return Vec{2.0, 1.0 + 1.0 / x[1], 2.0 - 2.0 / x[2]}; };
  sys.hess = [](const Vec& x) {
    Mat h(3, 3);
    h(1, 1) = -1.0 / (x[1] * x[1]);
    h(2, 2) = 2.0 / (x[2] * x[2]);
    return h;
  };
  sys.skew = [](const Vec& x) {
    Mat s(3, 3);
    s(0, 1) = -0.5 * x[0] * x[1];
    s(1, 0) = -s(0, 1);
    s(0, 2) = 0.5 * x[0] * x[2];
    s(2, 0) = -s(0, 2);
    s(1, 2) = -x[1] * x[2];
    s(2, 1) = -s(1, 2);
    return s;
  };
  sys.constant_S = false;
  std::vector<Scalar1D> parts(3);
  parts[0] = {[](double u) { return 2.0 * u; }, [](double) { return 2.0; },
              [](double) { return 0.0; }, [](double) { return 0.0; }};
  parts[1] = {[](double u) { return u + std::log(u); }, [](double u) { return 1.0 + 1.0 / u; },
              [](double u) { return -1.0 / (u * u); }, [](double u) { return 2.0 / (u * u * u); }};
  parts[2] = {[](double u) { return 2.0 * u - 2.0 * std::log(u); }, [](double u) { return 2.0 - 2.0 / u; },
              [](double u) { return 2.0 / (u * u); }, [](double u) { return -4.0 / (u * u * u); }};
  sys.separable_H = parts;
  sys.domain = [](const Vec& x, std::string* why) {
    if (x[1] > 0.0 && x[2] > 0.0) return true;
    if (why) *why = "x2 and x3 must stay positive";
    return false;
  };
  return Problem{"lotka-volterra", sys, {1.0, 1.9, 0.5}};
}

static Problem make_pendulum() {
  // H = 2 m g l (1 - cos q) + l^2 p^2 / (2 m) with m = l = 1, g = 3.
  SkewGradientSystem sys;
  sys.dim = 2;
  sys.name = "pendulum";
  sys.energy = [](const Vec& x) { return 6.0 * (1.0 - std::cos(x[0])) + 0.5 * x[1] * x[1]; };
  sys.grad = [](const Vec& x) { return Vec{6.0 * std::sin(x[0]), x[1]}; };
  sys.hess = [](const Vec& x) {
    Mat h(2, 2);
    h(0, 0) = 6.0 * std::cos(x[0]);
    h(1, 1) = 1.0;
    return h;
  };
  Mat S(2, 2);
  S(0, 1) = 1.0;
  S(1, 0) = -1.0;
  sys.skew = [S](const Vec&) { return S; };
  sys.constant_S = true;
  std::vector<Scalar1D> parts(2);
  parts[0] = {[](double u) { return 6.0 * (1.0 - std::cos(u)); }, [](double u) { return 6.0 * std::sin(u); },
              [](double u) { return 6.0 * std::cos(u); }, [](double u) { return -6.0 * std::sin(u); }};
  parts[1] = {[](double u) { return 0.5 * u * u; }, [](double u) { return u; },
              [](double) { return 1.0; }, [](double) { return 0.0; }};
  sys.separable_H = parts;
  return Problem{"pendulum", sys, {2.0, 0.0}};
}

Problem builtin_problem(const std::string& name) {
  if (name == "henon-heiles") return make_henon_heiles();
  if (name == "lotka-volterra") return make_lotka_volterra();
  if (name == "pendulum") return make_pendulum();
  throw ConfigError("unknown problem '" + name + "'; built-ins: henon-heiles, lotka-volterra, pendulum");
}

std::vector<std::string> builtin_problem_names() {
  return {"henon-heiles", "lotka-volterra", "pendulum"};
}

} // namespace dgflow
