#pragma once
// Multivariate polynomials stored as flat monomial lists. Used for problem
// descriptions given in coefficient form, for the product-rule discrete
// gradient, and for exact derivative evaluation in tests.

#include <array>
#include <cstdint>
#include <vector>

#include "dgflow/linalg.hpp"

namespace dgflow {

constexpr int kMaxDim = 16;

struct Monomial {
  double c = 0.0;
  std::array<std::uint8_t, kMaxDim> p{}; // exponent per variable
};

struct Polynomial {
  int dim = 0;
  std::vector<Monomial> terms;

  Polynomial() = default;
  explicit Polynomial(int d) : dim(d) {}

  double eval(const Vec& x) const;
  // d/dx_j, exact.
  Polynomial derivative(int j) const;
  int total_degree() const;
  // Drops zero terms and merges duplicate exponent patterns.
  void normalize();

  Vec gradient(const Vec& x) const;
  // Symmetric by construction (upper triangle mirrored).
  Mat hessian(const Vec& x) const;
};

// power with nonnegative integer exponent
double ipow(double x, int n);

} // namespace dgflow
