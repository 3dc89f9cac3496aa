#pragma once
// Skew-gradient systems xdot = S(x) grad H(x) with antisymmetric S(x).
// The energy H is the conserved quantity every integrator in this project
// is built around.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgflow/errors.hpp"
#include "dgflow/linalg.hpp"
#include "dgflow/polynomial.hpp"

namespace dgflow {

// One-dimensional summand of a separable energy H(x) = sum_i t_i(x_i).
// d3 may be null; it is only used to sharpen near-coincidence expansions.
struct Scalar1D {
  std::function<double(double)> val;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
};

struct SkewGradientSystem {
  int dim = 0;
  std::string name;

  std::function<double(const Vec&)> energy;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess; // filled with a finite-difference fallback if absent
  std::function<Mat(const Vec&)> skew;
  bool constant_S = false;

  // Structure hooks. When present they unlock exact discrete-gradient paths:
  // poly_H drives exact quadrature and the product-rule gradient, separable_H
  // drives per-coordinate divided differences, log_H lists c*ln(x_i) addenda
  // that accompany poly_H (their averaged gradient has a closed form).
  std::optional<Polynomial> poly_H;
  std::optional<std::vector<Scalar1D>> separable_H;
  std::vector<std::pair<double, int>> log_H;

  // User-supplied exact averaged gradient, checked before the built-in paths.
  struct ClosedFormAvf {
    std::function<Vec(const Vec&, const Vec&)> value;
    std::function<Mat(const Vec&, const Vec&)> jac2;
  };
  std::optional<ClosedFormAvf> closed_form_avf;

  // Returns false (and a reason) for states outside the domain of H.
  std::function<bool(const Vec&, std::string*)> domain;

  void check_state(const Vec& x) const;
};

struct Problem {
  std::string name;
  SkewGradientSystem system;
  Vec x0;
};

double eval_energy(const SkewGradientSystem& sys, const Vec& x);
Vec eval_field(const SkewGradientSystem& sys, const Vec& x); // S(x) grad H(x)

// S(x) = (f g^T - g f^T) / (g^T g) with g = grad H(x); reproduces f through
// S grad H whenever f is orthogonal to g. Throws NumericalError when g = 0.
Mat default_skew(const Vec& f, const Vec& g);

// Builds a system from field and energy callables through default_skew.
SkewGradientSystem system_from_field(int dim, std::function<Vec(const Vec&)> f,
                                     std::function<double(const Vec&)> H,
                                     std::function<Vec(const Vec&)> grad);

// Central-difference Hessian of the gradient, used when no analytic Hessian
// is supplied.
Mat fd_hessian(const std::function<Vec(const Vec&)>& grad, const Vec& x);

// Built-in problems: "henon-heiles", "lotka-volterra", "pendulum".
Problem builtin_problem(const std::string& name);
std::vector<std::string> builtin_problem_names();

} // namespace dgflow
