#pragma once
// Skew approximations sbar(x, xhat, h): a stage graph (points built from x,
// xhat, the midpoint, and h-scaled field evaluations) plus symmetrized
// matrix-product terms
//   b * h^n * ( S(v1) A1 S(v2) ... An S(v_{n+1}) - transpose )
// with atoms A either a Hessian of H or the discrete gradient's Q, each taken
// at a stage point (Q always pairs x with the stage point). Subtracting the
// transpose is algebraically the same as adding the sign-weighted reversed
// product and keeps every term antisymmetric to the last bit.

#include <string>
#include <vector>

#include "dgflow/dg.hpp"
#include "dgflow/system.hpp"
#include "dgflow/value.hpp"

namespace dgflow {

struct StageRef {
  enum Kind { X, XHAT, XBAR, STAGE };
  Kind kind = X;
  int index = -1; // STAGE only

  static StageRef x() { return {X, -1}; }
  static StageRef xhat() { return {XHAT, -1}; }
  static StageRef xbar() { return {XBAR, -1}; }
  static StageRef stage(int i) { return {STAGE, i}; }
  bool operator==(const StageRef& o) const {
    return kind == o.kind && (kind != STAGE || index == o.index);
  }
};

// z = sum_i a_i * point_i + h * sum_j c_j * f(point_j), sum_i a_i = 1.
struct StageDef {
  std::vector<std::pair<Value, StageRef>> lin;
  std::vector<std::pair<Value, StageRef>> field;
};

struct Factor {
  enum Shape { HESS, Q };
  Shape shape = HESS;
  StageRef at;
};

struct SbarTerm {
  Value b;
  std::vector<Factor> factors;       // n atoms
  std::vector<StageRef> skew_at;     // n+1 skew arguments
};

struct SbarScheme {
  std::string name;
  int nominal_order = 0;
  std::vector<StageDef> stages;
  std::vector<SbarTerm> terms;
  bool requires_constant_S = false;
  bool requires_symmetric_dg = false;
  bool implicit = false;

  bool uses_q() const;
  // Checks stage affine sums, acyclic references, term shapes, the
  // consistency sum of the order-0 coefficients, and the implicit flag.
  void validate() const;
};

// Catalog: dgm2, dgm3-const, dgm4-const, avf4, avf5, avf6-sym, avf6-exp,
// avf3-S, avf4-S-imp, avf4-S-exp, gen3-S, gen4-S, sym4-S, sym4-const,
// sym3-const.
SbarScheme builtin_scheme(const std::string& name);
std::vector<std::string> builtin_scheme_names();

// sbar(x, xhat, h); bitwise antisymmetric. h may carry either sign so that
// symmetric schemes can be stepped backwards.
Mat eval_sbar(const SbarScheme& scheme, const SkewGradientSystem& sys,
              const DiscreteGradient& dg, const Vec& x, const Vec& xhat,
              double h);

// JSON description mirroring StageDef/SbarTerm; see load_scheme_json's doc
// in the implementation for the schema.
SbarScheme load_scheme_json(const std::string& path);
// Catalog name or path to a .json description.
SbarScheme resolve_scheme(const std::string& name_or_path);

} // namespace dgflow
