#include "dgflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dgflow {

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

double Polynomial::eval(const Vec& x) const {
  double s = 0.0;
  for (const Monomial& m : terms) {
    double t = m.c;
    for (int j = 0; j < dim; ++j)
      if (m.p[j]) t *= ipow(x[j], m.p[j]);
    s += t;
  }
  return s;
}

Polynomial Polynomial::derivative(int j) const {
  Polynomial r(dim);
  for (const Monomial& m : terms) {
    if (m.p[j] == 0) continue;
    Monomial d = m;
    d.c = m.c * m.p[j];
    d.p[j] = static_cast<std::uint8_t>(m.p[j] - 1);
    r.terms.push_back(d);
  }
  r.normalize();
  return r;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const Monomial& m : terms) {
    int d = 0;
    for (int j = 0; j < dim; ++j) d += m.p[j];
    deg = std::max(deg, d);
  }
  return deg;
}

void Polynomial::normalize() {
  std::map<std::array<std::uint8_t, kMaxDim>, double> acc;
  for (const Monomial& m : terms) acc[m.p] += m.c;
  terms.clear();
  for (const auto& [p, c] : acc) {
    if (c == 0.0) continue;
    Monomial m;
    m.c = c;
    m.p = p;
    terms.push_back(m);
  }
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g(dim, 0.0);
  for (const Monomial& m : terms) {
    for (int j = 0; j < dim; ++j) {
      if (m.p[j] == 0) continue;
      double t = m.c * m.p[j] * ipow(x[j], m.p[j] - 1);
      for (int k = 0; k < dim; ++k)
        if (k != j && m.p[k]) t *= ipow(x[k], m.p[k]);
      g[j] += t;
    }
  }
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  Mat h(dim, dim);
  for (const Monomial& m : terms) {
    for (int i = 0; i < dim; ++i) {
      if (m.p[i] == 0) continue;
      // diagonal
      if (m.p[i] >= 2) {
        double t = m.c * m.p[i] * (m.p[i] - 1) * ipow(x[i], m.p[i] - 2);
        for (int k = 0; k < dim; ++k)
          if (k != i && m.p[k]) t *= ipow(x[k], m.p[k]);
        h(i, i) += t;
      }
      for (int j = i + 1; j < dim; ++j) {
        if (m.p[j] == 0) continue;
        double t = m.c * m.p[i] * m.p[j] * ipow(x[i], m.p[i] - 1) * ipow(x[j], m.p[j] - 1);
        for (int k = 0; k < dim; ++k)
          if (k != i && k != j && m.p[k]) t *= ipow(x[k], m.p[k]);
        h(i, j) += t;
      }
    }
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) h(j, i) = h(i, j);
  return h;
}

} // namespace dgflow
