#pragma once
// Shared helpers for the test binaries: random polynomial energies, random
// antisymmetric matrices, and a SkewGradientSystem wrapper around them.

#include <random>

#include "dgflow/polynomial.hpp"
#include "dgflow/system.hpp"

namespace dgflow::testutil {

inline Polynomial random_poly(std::mt19937_64& rng, int dim, int deg) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> pw(0, deg);
  Polynomial p;
  p.dim = dim;
  for (int t = 0; t < 4 * dim; ++t) {
    Monomial m;
    m.c = coef(rng);
    int total = 0;
    for (int i = 0; i < dim; ++i) {
      int e = pw(rng);
      if (total + e > deg) e = deg - total;
      m.p[static_cast<size_t>(i)] = static_cast<std::uint8_t>(e);
      total += e;
    }
    p.terms.push_back(m);
  }
  p.normalize();
  return p;
}

inline Mat random_antisym(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat s(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      s(i, j) = u(rng);
      s(j, i) = -s(i, j);
    }
  return s;
}

inline Vec random_vec(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec x(dim);
  for (double& v : x) v = u(rng);
  return x;
}

// System with polynomial energy and constant skew matrix. poly_H is set, so
// the averaged gradient uses exact quadrature.
inline SkewGradientSystem poly_system(const Polynomial& H, const Mat& S) {
  SkewGradientSystem sys;
  sys.dim = H.dim;
  sys.name = "poly-test";
  sys.poly_H = H;
  sys.energy = [H](const Vec& x) { return H.eval(x); };
  sys.grad = [H](const Vec& x) { return H.gradient(x); };
  sys.hess = [H](const Vec& x) { return H.hessian(x); };
  sys.skew = [S](const Vec&) { return S; };
  sys.constant_S = true;
  return sys;
}

} // namespace dgflow::testutil
