#pragma once
// Discrete gradients: two-point maps gbar(x,y) with
//   gbar(x,y)^T (y-x) = H(y) - H(x)   (secant condition)
//   gbar(x,x)        = grad H(x)      (consistency)
// plus their second-argument Jacobians D2 gbar and the antisymmetric defect
// Q(x,y) = (D2^T - D2)/2. The Jacobians feed the quasi-Newton solve and the
// order-condition machinery; Q vanishes identically for the averaged kind.

#include <functional>
#include <string>
#include <vector>

#include "dgflow/system.hpp"

namespace dgflow {

enum class DgKind { Avf, ItohAbe, SymItohAbe, Furihata, GonzalezMidpoint };

struct DiscreteGradient {
  DgKind kind = DgKind::Avf;
  // Averaged kind only. 0 = automatic: ceil(deg(H)/2) nodes for polynomial H
  // (exact), 8 nodes otherwise (approximate, warned once).
  int quadrature_nodes = 0;
  // Divided differences switch to the derivative branch when
  // |y_j - x_j| <= coincidence_rel * (1 + |x_j|).
  double coincidence_rel = 1e-8;
};

Vec dg_eval(const DiscreteGradient& dg, const SkewGradientSystem& sys,
            const Vec& x, const Vec& y);

// D2 gbar(x,y). Refused (ConfigError) for the midpoint kind, whose second
// derivatives are singular at y=x.
Mat dg_jacobian2(const DiscreteGradient& dg, const SkewGradientSystem& sys,
                 const Vec& x, const Vec& y);

// Q(x,y) = ((D2 gbar)^T - D2 gbar)/2, antisymmetric by construction.
Mat dg_q(const DiscreteGradient& dg, const SkewGradientSystem& sys,
         const Vec& x, const Vec& y);

// gbar(x,y) == gbar(y,x) for all arguments.
bool dg_is_symmetric(DgKind k);
// False for the midpoint kind only.
bool dg_has_jacobian(DgKind k);

// Names accepted on the command line: avf, itoh-abe, sia, furihata, midpoint.
DgKind dg_kind_from_name(const std::string& name);
const char* dg_kind_name(DgKind k);
std::vector<std::string> dg_kind_names();

// Central-difference oracle for D2 of an arbitrary two-point map,
// step 1e-6*(1+|y_j|). Also the production fallback when a user-supplied
// closed-form averaged gradient comes without a Jacobian.
Mat fd_jacobian2(const std::function<Vec(const Vec&, const Vec&)>& g,
                 const Vec& x, const Vec& y);

// Gauss-Legendre nodes/weights on [0,1], exact for degree <= 2n-1. Cached.
struct QuadRule {
  std::vector<double> node;
  std::vector<double> weight;
};
const QuadRule& gauss_legendre_01(int n);

} // namespace dgflow
