#include "dgflow/sbar.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace dgflow {

namespace {

const StageRef RX = StageRef::x();
const StageRef RXH = StageRef::xhat();
const StageRef RXB = StageRef::xbar();
StageRef Z(int i) { return StageRef::stage(i); }

Value R(long long n, long long d = 1) { return Value(n, d); }
Value A(double v) { return Value::approx(v); }

// base + c*h*f(at)
StageDef euler(StageRef base, Value c, StageRef at) {
  StageDef s;
  s.lin.push_back({R(1), base});
  s.field.push_back({c, at});
  return s;
}

Factor He(StageRef at) { return {Factor::HESS, at}; }
Factor Qf(StageRef at) { return {Factor::Q, at}; }

SbarTerm term(Value b, std::vector<Factor> factors, std::vector<StageRef> skew) {
  return SbarTerm{b, std::move(factors), std::move(skew)};
}

bool ref_implicit(const StageRef& r) {
  return r.kind == StageRef::XHAT || r.kind == StageRef::XBAR;
}

// The explicit 4th-order stage pattern shared by three schemes: the skew
// matrix is evaluated at c +- s where c is an affine combination of the Euler
// chain (x, w1..w4) and s is a sqrt(3)-weighted difference vector; folding
// c +- s keeps every stage a consistent point (affine weights sum to 1).
void fold_pm_stages(SbarScheme& sch, const StageRef pts[5]) {
  const double s3 = std::sqrt(3.0);
  double cc[5] = {1.0 / 3, 1.0 / 3, 1.0 / 3, -1.0 / 12, 1.0 / 12};
  double dd[5] = {7 * s3 / 36, -s3 / 18, -s3 / 9, s3 / 36, -s3 / 18};
  StageDef zp, zm;
  for (int i = 0; i < 5; ++i) {
    zp.lin.push_back({A(cc[i] + dd[i]), pts[i]});
    zm.lin.push_back({A(cc[i] - dd[i]), pts[i]});
  }
  sch.stages.push_back(zp);
  sch.stages.push_back(zm);
}

SbarScheme make_dgm2() {
  SbarScheme s;
  s.name = "dgm2";
  s.nominal_order = 2;
  s.terms = {term(R(1, 2), {}, {RXB})};
  s.implicit = true;
  return s;
}

SbarScheme make_dgm3_const() {
  SbarScheme s;
  s.name = "dgm3-const";
  s.nominal_order = 3;
  s.requires_constant_S = true;
  s.stages = {euler(RX, R(2, 3), RX)};
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(1, 2), {Qf(Z(0))}, {RX, RX}),
      term(R(1, 2), {Qf(RX), Qf(RX)}, {RX, RX, RX}),
      term(R(-1, 24), {He(RX), He(RX)}, {RX, RX, RX}),
  };
  return s;
}

SbarScheme make_dgm4_const() {
  SbarScheme s;
  s.name = "dgm4-const";
  s.nominal_order = 4;
  s.requires_constant_S = true;
  s.stages = {euler(RX, R(1, 2), RX),    // z1
              euler(RX, R(2, 3), RX),    // z2
              euler(RX, R(3, 4), Z(0))}; // z3
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(4, 9), {Qf(Z(2))}, {RX, RX}),
      term(R(1, 18), {Qf(RX)}, {RX, RX}),
      term(R(1, 2), {Qf(Z(1)), Qf(Z(1))}, {RX, RX, RX}),
      term(R(-1, 24), {He(Z(0)), He(Z(0))}, {RX, RX, RX}),
      term(R(1, 2), {Qf(RX), Qf(RX), Qf(RX)}, {RX, RX, RX, RX}),
      term(R(-1, 12), {He(RX), He(RX), Qf(RX)}, {RX, RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf4() {
  SbarScheme s;
  s.name = "avf4";
  s.nominal_order = 4;
  s.requires_constant_S = true;
  s.stages = {euler(RX, R(1, 2), RX)};
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(-1, 24), {He(Z(0)), He(Z(0))}, {RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf5() {
  SbarScheme s;
  s.name = "avf5";
  s.nominal_order = 5;
  s.requires_constant_S = true;
  const double s17 = std::sqrt(17.0);
  s.stages = {euler(RX, R(2, 5), RX),
              euler(RX, A((17.0 + s17) / 30.0), Z(0)),
              euler(RX, A((17.0 - s17) / 30.0), Z(0))};
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(-5, 136), {He(Z(1)), He(Z(2))}, {RX, RX, RX}),
      term(R(-1, 204), {He(RX), He(RX)}, {RX, RX, RX}),
      term(R(1, 288), {He(RX), He(RX), He(Z(0))}, {RX, RX, RX, RX}),
      term(R(1, 240), {He(RX), He(RX), He(RX), He(RX)}, {RX, RX, RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf6_sym() {
  SbarScheme s;
  s.name = "avf6-sym";
  s.nominal_order = 6;
  s.requires_constant_S = true;
  s.implicit = true;
  const double s13 = std::sqrt(13.0);
  s.stages = {euler(RXB, A(-3.0 * s13 / 26.0), RXB), // w1
              euler(RXB, A(3.0 * s13 / 26.0), RXB),  // w2
              euler(RXB, A(s13 / 26.0), Z(0)),       // za
              euler(RXB, A(-s13 / 26.0), Z(1)),      // zb
              euler(RXB, R(-1, 2), RXB),             // u1
              euler(RXB, R(1, 2), RXB)};             // u2
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(-13, 360), {He(Z(2)), He(Z(3))}, {RX, RX, RX}),
      term(R(-1, 360), {He(RX), He(RX)}, {RX, RX, RX}),
      term(R(-1, 360), {He(RXH), He(RXH)}, {RX, RX, RX}),
      term(R(1, 720), {He(Z(4)), He(RXB), He(Z(5))}, {RX, RX, RX, RX}),
      term(R(1, 240), {He(RXB), He(RXB), He(RXB), He(RXB)},
           {RX, RX, RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf6_exp() {
  SbarScheme s;
  s.name = "avf6-exp";
  s.nominal_order = 6;
  s.requires_constant_S = true;
  const double s13 = std::sqrt(13.0);
  s.stages.resize(9);
  s.stages[0] = euler(RX, R(1, 3), RX);   // p1
  s.stages[1] = euler(RX, R(2, 3), Z(0)); // p2
  s.stages[2].lin = {{R(1), RX}};         // z1 = x + h/4 f(x) + 3h/4 f(p2)
  s.stages[2].field = {{R(1, 4), RX}, {R(3, 4), Z(1)}};
  s.stages[3] = euler(RX, R(1, 2), RX); // z2
  s.stages[4] = euler(RX, R(1), Z(3));  // z3
  s.stages[5].lin = {{R(1, 2), RX}, {R(1, 2), Z(4)}}; // z4
  s.stages[5].field = {{A(-3.0 * s13 / 26.0), Z(3)}};
  s.stages[6].lin = {{R(1, 2), RX}, {R(1, 2), Z(4)}}; // z5
  s.stages[6].field = {{A(3.0 * s13 / 26.0), Z(3)}};
  s.stages[7].lin = {{R(1, 2), RX}, {R(1, 2), Z(2)}}; // z6
  s.stages[7].field = {{A(s13 / 26.0), Z(5)}};
  s.stages[8].lin = {{R(1, 2), RX}, {R(1, 2), Z(2)}}; // z7
  s.stages[8].field = {{A(-s13 / 26.0), Z(6)}};
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(-13, 360), {He(Z(7)), He(Z(8))}, {RX, RX, RX}),
      term(R(-1, 360), {He(RX), He(RX)}, {RX, RX, RX}),
      term(R(-1, 360), {He(Z(2)), He(Z(2))}, {RX, RX, RX}),
      term(R(1, 720), {He(RX), He(Z(3)), He(Z(4))}, {RX, RX, RX, RX}),
      term(R(1, 240), {He(Z(3)), He(Z(3)), He(Z(3)), He(Z(3))},
           {RX, RX, RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf3_S() {
  SbarScheme s;
  s.name = "avf3-S";
  s.nominal_order = 3;
  s.stages = {euler(RX, R(1, 3), RX),    // z1
              euler(RX, R(2, 3), Z(0))}; // z2
  s.terms = {
      term(R(1, 8), {}, {RX}),
      term(R(3, 8), {}, {Z(1)}),
      term(R(1, 4), {He(RX)}, {Z(0), RX}),
      term(R(-1, 24), {He(RX), He(RX)}, {RX, RX, RX}),
  };
  return s;
}

SbarScheme make_avf4_S_imp() {
  SbarScheme s;
  s.name = "avf4-S-imp";
  s.nominal_order = 4;
  s.implicit = true;
  const double c = 1.0 / std::sqrt(12.0);
  s.stages = {euler(RXB, A(c), RXB),     // a+
              euler(RXB, A(-c), RXB),    // a-
              euler(RXB, A(-c), Z(0)),   // v1
              euler(RXB, A(c), Z(1)),    // v2
              euler(RXB, R(1, 12), RXB), // w+
              euler(RXB, R(-1, 12), RXB)}; // w-
  s.terms = {
      term(R(1, 4), {}, {Z(2)}),
      term(R(1, 4), {}, {Z(3)}),
      term(R(1, 2), {He(RXB)}, {Z(4), Z(5)}),
      term(R(-1, 24), {He(RXB), He(RXB)}, {RXB, RXB, RXB}),
  };
  return s;
}

SbarScheme make_avf4_S_exp() {
  SbarScheme s;
  s.name = "avf4-S-exp";
  s.nominal_order = 4;
  s.stages = {euler(RX, R(1, 2), RX),   // z1
              euler(RX, R(1), Z(0)),    // z2
              euler(RX, R(1), Z(1)),    // z3
              euler(RX, R(1), Z(2))};   // z4
  const StageRef pts[5] = {RX, Z(0), Z(1), Z(2), Z(3)};
  fold_pm_stages(s, pts); // stages 4, 5
  s.terms = {
      term(R(1, 4), {}, {Z(4)}),
      term(R(1, 4), {}, {Z(5)}),
      term(R(1, 12), {He(Z(0))}, {Z(1), RX}),
      term(R(-1, 24), {He(Z(0)), He(Z(0))}, {Z(0), Z(0), Z(0)}),
  };
  return s;
}

SbarScheme make_gen3_S() {
  SbarScheme s;
  s.name = "gen3-S";
  s.nominal_order = 3;
  s.stages = {euler(RX, R(1, 3), RX),    // z1
              euler(RX, R(1, 2), RX),    // z2
              euler(RX, R(2, 3), Z(0))}; // z3
  s.terms = {
      term(R(1, 8), {}, {RX}),
      term(R(3, 8), {}, {Z(2)}),
      term(R(1, 2), {Qf(Z(2))}, {Z(1), Z(1)}),
      term(R(1, 4), {He(RX)}, {Z(0), RX}),
      term(R(1, 2), {Qf(RX), Qf(RX)}, {RX, RX, RX}),
      term(R(-1, 24), {He(RX), He(RX)}, {RX, RX, RX}),
  };
  return s;
}

SbarScheme make_gen4_S() {
  SbarScheme s;
  s.name = "gen4-S";
  s.nominal_order = 4;
  const double s7 = std::sqrt(7.0);
  s.stages = {euler(RX, R(1, 3), RX),              // z1
              euler(RX, R(1, 2), RX),              // z2
              euler(RX, A((7.0 - s7) / 12.0), Z(0)), // z3
              euler(RX, A((7.0 + s7) / 12.0), Z(0)), // z4
              euler(RX, R(2, 3), Z(1)),            // z5
              euler(RX, R(1), Z(1)),               // z6
              euler(RX, R(5, 4), Z(1)),            // z7
              euler(RX, R(4, 3), Z(1)),            // z8
              euler(RX, R(1), Z(5)),               // z9
              euler(RX, R(1), Z(8))};              // z10
  const StageRef pts[5] = {RX, Z(1), Z(5), Z(8), Z(9)};
  fold_pm_stages(s, pts); // stages 10, 11
  s.terms = {
      term(R(1, 4), {}, {Z(10)}),
      term(R(1, 4), {}, {Z(11)}),
      term(R(1, 12), {He(Z(1))}, {Z(5), RX}),
      term(R(3, 7), {Qf(Z(4))}, {Z(2), Z(3)}),
      term(R(4, 105), {Qf(Z(6))}, {RX, RX}),
      term(R(1, 30), {Qf(RX)}, {RX, RX}),
      term(R(1, 2), {Qf(Z(4)), Qf(Z(4))}, {Z(1), Z(7), Z(1)}),
      term(R(-1, 24), {He(Z(1)), He(Z(1))}, {Z(1), Z(1), Z(1)}),
      term(R(1, 6), {He(RX), Qf(RX)}, {Z(1), RX, RX}),
      term(R(-1, 6), {He(RX), Qf(RX)}, {RX, RX, RX}),
      term(R(1, 2), {Qf(RX), Qf(RX), Qf(RX)}, {RX, RX, RX, RX}),
      term(R(-1, 12), {He(RX), He(RX), Qf(RX)}, {RX, RX, RX, RX}),
  };
  return s;
}

SbarScheme make_sym4_S() {
  SbarScheme s;
  s.name = "sym4-S";
  s.nominal_order = 4;
  s.requires_symmetric_dg = true;
  s.stages = {euler(RX, R(1, 2), RX), // z1
              euler(RX, R(1), Z(0)),  // z2
              euler(RX, R(1), Z(1)),  // z3
              euler(RX, R(1), Z(2))}; // z4
  const StageRef pts[5] = {RX, Z(0), Z(1), Z(2), Z(3)};
  fold_pm_stages(s, pts);                   // stages 4, 5
  s.stages.push_back(euler(RX, R(3, 4), Z(0))); // z7, stage 6
  s.terms = {
      term(R(1, 4), {}, {Z(4)}),
      term(R(1, 4), {}, {Z(5)}),
      term(R(1, 12), {He(Z(0))}, {Z(1), RX}),
      term(R(4, 9), {Qf(Z(6))}, {Z(0), Z(0)}),
      term(R(-1, 24), {He(Z(0)), He(Z(0))}, {Z(0), Z(0), Z(0)}),
  };
  return s;
}

SbarScheme make_sym4_const() {
  SbarScheme s;
  s.name = "sym4-const";
  s.nominal_order = 4;
  s.requires_constant_S = true;
  s.requires_symmetric_dg = true;
  s.stages = {euler(RX, R(1, 2), RX),    // z1
              euler(RX, R(3, 4), Z(0))}; // z7
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(4, 9), {Qf(Z(1))}, {RX, RX}),
      term(R(-1, 24), {He(Z(0)), He(Z(0))}, {RX, RX, RX}),
  };
  return s;
}

SbarScheme make_sym3_const() {
  SbarScheme s;
  s.name = "sym3-const";
  s.nominal_order = 3;
  s.requires_constant_S = true;
  s.requires_symmetric_dg = true;
  s.stages = {euler(RX, R(2, 3), RX)};
  s.terms = {
      term(R(1, 2), {}, {RX}),
      term(R(1, 2), {Qf(Z(0))}, {RX, RX}),
      term(R(-1, 24), {He(RX), He(RX)}, {RX, RX, RX}),
  };
  return s;
}

} // namespace

bool SbarScheme::uses_q() const {
  for (const SbarTerm& t : terms)
    for (const Factor& f : t.factors)
      if (f.shape == Factor::Q) return true;
  return false;
}

void SbarScheme::validate() const {
  bool uses_implicit = false;
  auto check_ref = [&](const StageRef& r, int before) {
    if (ref_implicit(r)) uses_implicit = true;
    if (r.kind == StageRef::STAGE && (r.index < 0 || r.index >= before))
      throw ConfigError("scheme '" + name +
                        "': stage reference out of range or not yet defined");
  };
  for (size_t i = 0; i < stages.size(); ++i) {
    Value sum = R(0);
    for (const auto& [c, r] : stages[i].lin) {
      sum = sum + c;
      check_ref(r, static_cast<int>(i));
    }
    for (const auto& [c, r] : stages[i].field) check_ref(r, static_cast<int>(i));
    if (std::abs(sum.to_double() - 1.0) > 1e-12)
      throw ConfigError("scheme '" + name + "': stage " + std::to_string(i + 1) +
                        " affine weights sum to " + std::to_string(sum.to_double()) +
                        ", expected 1");
  }
  int nstages = static_cast<int>(stages.size());
  Value b0 = R(0);
  for (const SbarTerm& t : terms) {
    if (t.skew_at.size() != t.factors.size() + 1)
      throw ConfigError("scheme '" + name +
                        "': a term needs exactly one more skew argument than "
                        "matrix atoms");
    for (const StageRef& r : t.skew_at) check_ref(r, nstages);
    for (const Factor& f : t.factors) check_ref(f.at, nstages);
    if (t.factors.empty()) b0 = b0 + t.b;
  }
  if (std::abs(b0.to_double() - 0.5) > 1e-12)
    throw ConfigError("scheme '" + name +
                      "': order-0 coefficients sum to " +
                      std::to_string(b0.to_double()) + ", expected 1/2");
  if (uses_implicit != implicit)
    throw ConfigError("scheme '" + name + "': implicit flag is " +
                      std::string(implicit ? "set" : "clear") +
                      " but the stage/term references say otherwise");
}

std::vector<std::string> builtin_scheme_names() {
  return {"dgm2",      "dgm3-const", "dgm4-const", "avf4",      "avf5",
          "avf6-sym",  "avf6-exp",   "avf3-S",     "avf4-S-imp", "avf4-S-exp",
          "gen3-S",    "gen4-S",     "sym4-S",     "sym4-const", "sym3-const"};
}

SbarScheme builtin_scheme(const std::string& name) {
  SbarScheme s;
  if (name == "dgm2") s = make_dgm2();
  else if (name == "dgm3-const") s = make_dgm3_const();
  else if (name == "dgm4-const") s = make_dgm4_const();
  else if (name == "avf4") s = make_avf4();
  else if (name == "avf5") s = make_avf5();
  else if (name == "avf6-sym") s = make_avf6_sym();
  else if (name == "avf6-exp") s = make_avf6_exp();
  else if (name == "avf3-S") s = make_avf3_S();
  else if (name == "avf4-S-imp") s = make_avf4_S_imp();
  else if (name == "avf4-S-exp") s = make_avf4_S_exp();
  else if (name == "gen3-S") s = make_gen3_S();
  else if (name == "gen4-S") s = make_gen4_S();
  else if (name == "sym4-S") s = make_sym4_S();
  else if (name == "sym4-const") s = make_sym4_const();
  else if (name == "sym3-const") s = make_sym3_const();
  else {
    std::string all;
    for (const std::string& n : builtin_scheme_names()) all += " " + n;
    throw ConfigError("unknown scheme '" + name + "' (catalog:" + all + ")");
  }
  s.validate();
  return s;
}

Mat eval_sbar(const SbarScheme& scheme, const SkewGradientSystem& sys,
              const DiscreteGradient& dg, const Vec& x, const Vec& xhat,
              double h) {
  if (scheme.requires_constant_S && !sys.constant_S)
    throw ConfigError("scheme '" + scheme.name +
                      "' needs a constant S, but system '" + sys.name +
                      "' has a state-dependent one");
  if (scheme.requires_symmetric_dg && !dg_is_symmetric(dg.kind))
    throw ConfigError("scheme '" + scheme.name +
                      "' needs a symmetric discrete gradient; '" +
                      std::string(dg_kind_name(dg.kind)) + "' is not symmetric");
  if (scheme.uses_q() && !dg_has_jacobian(dg.kind))
    throw ConfigError("scheme '" + scheme.name +
                      "' evaluates Q, which the '" +
                      std::string(dg_kind_name(dg.kind)) +
                      "' discrete gradient does not provide");

  int d = sys.dim;
  Vec xbar(d);
  for (int i = 0; i < d; ++i) xbar[i] = 0.5 * (x[i] + xhat[i]);

  std::vector<Vec> zs(scheme.stages.size());
  auto point = [&](const StageRef& r) -> const Vec& {
    switch (r.kind) {
      case StageRef::X: return x;
      case StageRef::XHAT: return xhat;
      case StageRef::XBAR: return xbar;
      case StageRef::STAGE: return zs[r.index];
    }
    return x;
  };
  for (size_t i = 0; i < scheme.stages.size(); ++i) {
    const StageDef& sd = scheme.stages[i];
    Vec z(d, 0.0);
    for (const auto& [c, r] : sd.lin) axpy(c.to_double(), point(r), z);
    for (const auto& [c, r] : sd.field)
      axpy(h * c.to_double(), eval_field(sys, point(r)), z);
    zs[i] = std::move(z);
  }

  // caches keyed by enum kind (0..2) or 3+stage index
  auto key = [](const StageRef& r) {
    return r.kind == StageRef::STAGE ? 3 + r.index : static_cast<int>(r.kind);
  };
  std::vector<Mat> skew_cache(3 + scheme.stages.size());
  std::vector<Mat> hess_cache(3 + scheme.stages.size());
  std::vector<Mat> q_cache(3 + scheme.stages.size());
  auto skew_at = [&](const StageRef& r) -> const Mat& {
    Mat& m = skew_cache[key(r)];
    if (m.rows == 0) m = sys.skew(point(r));
    return m;
  };
  auto atom_at = [&](const Factor& f) -> const Mat& {
    if (f.shape == Factor::HESS) {
      Mat& m = hess_cache[key(f.at)];
      if (m.rows == 0) m = sys.hess(point(f.at));
      return m;
    }
    Mat& m = q_cache[key(f.at)];
    if (m.rows == 0) m = dg_q(dg, sys, x, point(f.at));
    return m;
  };

  Mat total(d, d);
  for (const SbarTerm& t : scheme.terms) {
    Mat F = skew_at(t.skew_at[0]);
    for (size_t k = 0; k < t.factors.size(); ++k)
      F = (F * atom_at(t.factors[k])) * skew_at(t.skew_at[k + 1]);
    double c = t.b.to_double() * ipow(h, static_cast<int>(t.factors.size()));
    // b*(F - F^T) equals the term plus its sign-weighted reversal and is
    // antisymmetric to the last bit.
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) total(i, j) += c * (F(i, j) - F(j, i));
  }
  return total;
}

// JSON schema:
//   {
//     "name": "...", "order": 3,
//     "requires_constant_S": bool, "requires_symmetric_dg": bool,
//     "stages": [ {"lin":   [{"c": 1, "at": "x"}, ...],
//                  "field": [{"c": "2/3", "at": "z1"}, ...]}, ... ],
//     "terms":  [ {"b": "-1/24",
//                  "factors": [{"kind": "hess"|"q", "at": "x"}, ...],
//                  "skew": ["x", "z1", ...]}, ... ]
//   }
// Coefficients are numbers or exact "p/q" strings; points are "x", "xhat",
// "xbar" or "zN" (1-based index into "stages").
namespace {

Value parse_value(const nlohmann::json& j, const std::string& where) {
  if (j.is_number_integer()) return Value::integer(j.get<long long>());
  if (j.is_number()) return Value::approx(j.get<double>());
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    size_t slash = s.find('/');
    try {
      if (slash == std::string::npos) return Value::integer(std::stoll(s));
      return Value(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
      throw ConfigError(where + ": cannot parse coefficient '" + s + "'");
    }
  }
  throw ConfigError(where + ": coefficient must be a number or a \"p/q\" string");
}

StageRef parse_ref(const std::string& s, const std::string& where) {
  if (s == "x") return StageRef::x();
  if (s == "xhat") return StageRef::xhat();
  if (s == "xbar") return StageRef::xbar();
  if (s.size() >= 2 && s[0] == 'z') {
    try {
      int i = std::stoi(s.substr(1));
      if (i >= 1) return StageRef::stage(i - 1);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(where + ": bad point reference '" + s +
                    "' (use x, xhat, xbar or zN)");
}

} // namespace

SbarScheme load_scheme_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scheme file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("scheme file " + path + " is not valid JSON: " + e.what());
  }
  SbarScheme s;
  s.name = j.value("name", std::filesystem::path(path).stem().string());
  s.nominal_order = j.value("order", 0);
  s.requires_constant_S = j.value("requires_constant_S", false);
  s.requires_symmetric_dg = j.value("requires_symmetric_dg", false);
  bool implicit = false;
  auto track = [&implicit](const StageRef& r) {
    if (ref_implicit(r)) implicit = true;
    return r;
  };
  if (j.contains("stages")) {
    for (const auto& js : j.at("stages")) {
      StageDef sd;
      for (const auto& e : js.value("lin", nlohmann::json::array()))
        sd.lin.push_back({parse_value(e.at("c"), "stage lin"),
                          track(parse_ref(e.at("at").get<std::string>(), "stage lin"))});
      for (const auto& e : js.value("field", nlohmann::json::array()))
        sd.field.push_back({parse_value(e.at("c"), "stage field"),
                            track(parse_ref(e.at("at").get<std::string>(), "stage field"))});
      s.stages.push_back(std::move(sd));
    }
  }
  if (!j.contains("terms")) throw ConfigError("scheme file needs \"terms\"");
  for (const auto& jt : j.at("terms")) {
    SbarTerm t;
    t.b = parse_value(jt.at("b"), "term");
    for (const auto& e : jt.value("factors", nlohmann::json::array())) {
      std::string kind = e.at("kind").get<std::string>();
      Factor f;
      if (kind == "hess") f.shape = Factor::HESS;
      else if (kind == "q") f.shape = Factor::Q;
      else throw ConfigError("term factor kind must be \"hess\" or \"q\"");
      f.at = track(parse_ref(e.at("at").get<std::string>(), "term factor"));
      t.factors.push_back(f);
    }
    for (const auto& e : jt.at("skew"))
      t.skew_at.push_back(track(parse_ref(e.get<std::string>(), "term skew")));
    s.terms.push_back(std::move(t));
  }
  s.implicit = implicit;
  s.validate();
  return s;
}

SbarScheme resolve_scheme(const std::string& name_or_path) {
  for (const std::string& n : builtin_scheme_names())
    if (n == name_or_path) return builtin_scheme(n);
  if (name_or_path.size() > 5 &&
      name_or_path.substr(name_or_path.size() - 5) == ".json")
    return load_scheme_json(name_or_path);
  std::string all;
  for (const std::string& n : builtin_scheme_names()) all += " " + n;
  throw ConfigError("unknown scheme '" + name_or_path + "' (catalog:" + all +
                    "; or pass a .json path)");
}

} // namespace dgflow
