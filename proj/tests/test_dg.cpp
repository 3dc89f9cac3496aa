#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dgflow/dg.hpp"
#include "util.hpp"

using namespace dgflow;
using namespace dgflow::testutil;

static const DgKind kAllKinds[] = {DgKind::Avf, DgKind::ItohAbe,
                                   DgKind::SymItohAbe, DgKind::Furihata,
                                   DgKind::GonzalezMidpoint};

TEST_CASE("secant and consistency on random polynomial energies") {
  std::mt19937_64 rng(101);
  for (DgKind kind : kAllKinds) {
    DiscreteGradient dg;
    dg.kind = kind;
    double worst_secant = 0.0;
    double worst_consistency = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      int dim = 2 + static_cast<int>(rng() % 3);
      Polynomial H = random_poly(rng, dim, 4);
      SkewGradientSystem sys = poly_system(H, random_antisym(rng, dim));
      Vec x = random_vec(rng, dim, -1.0, 1.0);
      Vec y = random_vec(rng, dim, -1.0, 1.0);

      Vec g = dg_eval(dg, sys, x, y);
      double lhs = dot(g, y - x);
      double rhs = H.eval(y) - H.eval(x);
      double secant = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
      worst_secant = std::max(worst_secant, secant);

      Vec gc = dg_eval(dg, sys, x, x);
      Vec ge = H.gradient(x);
      double cons = norm_inf(gc - ge) / (1.0 + norm_inf(ge));
      worst_consistency = std::max(worst_consistency, cons);
    }
    INFO("kind ", dg_kind_name(kind));
    CHECK(worst_secant <= 1e-10);
    CHECK(worst_consistency <= 1e-12);
  }
}

TEST_CASE("secant on the log-bearing builtin energy") {
  SkewGradientSystem sys = builtin_problem("lotka-volterra").system;
  std::mt19937_64 rng(17);
  for (DgKind kind : kAllKinds) {
    DiscreteGradient dg;
    dg.kind = kind;
    for (int trial = 0; trial < 50; ++trial) {
      Vec x = random_vec(rng, 3, 0.3, 2.5);
      Vec y = random_vec(rng, 3, 0.3, 2.5);
      Vec g = dg_eval(dg, sys, x, y);
      double rhs = eval_energy(sys, y) - eval_energy(sys, x);
      CHECK(std::abs(dot(g, y - x) - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("coincidence guard survives exactly equal coordinates") {
  std::mt19937_64 rng(23);
  Polynomial H = random_poly(rng, 3, 4);
  SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
  Vec x{0.4, -0.2, 0.9};
  Vec y{0.4, 0.3, 0.9}; // two coordinates meet exactly
  for (DgKind kind : {DgKind::ItohAbe, DgKind::SymItohAbe, DgKind::Furihata}) {
    DiscreteGradient dg;
    dg.kind = kind;
    Vec g = dg_eval(dg, sys, x, y);
    double rhs = H.eval(y) - H.eval(x);
    CHECK(std::abs(dot(g, y - x) - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("sum of the coincident Jacobian and its transpose is the hessian") {
  std::mt19937_64 rng(31);
  for (DgKind kind :
       {DgKind::Avf, DgKind::ItohAbe, DgKind::SymItohAbe, DgKind::Furihata}) {
    DiscreteGradient dg;
    dg.kind = kind;
    for (int trial = 0; trial < 20; ++trial) {
      Polynomial H = random_poly(rng, 3, 4);
      SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
      Vec x = random_vec(rng, 3, -0.8, 0.8);
      Mat j = dg_jacobian2(dg, sys, x, x);
      Mat hess = H.hessian(x);
      Mat sum = j + j.transposed();
      INFO("kind ", dg_kind_name(kind));
      CHECK(norm_inf(sum - hess) <= 1e-8 * (1.0 + norm_inf(hess)));
    }
  }
}

TEST_CASE("symmetric kinds have half-hessian coincident Jacobians") {
  std::mt19937_64 rng(37);
  for (DgKind kind : kAllKinds) {
    if (!dg_is_symmetric(kind) || !dg_has_jacobian(kind)) continue;
    DiscreteGradient dg;
    dg.kind = kind;
    for (int trial = 0; trial < 20; ++trial) {
      Polynomial H = random_poly(rng, 3, 4);
      SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
      Vec x = random_vec(rng, 3, -0.8, 0.8);
      Mat j = dg_jacobian2(dg, sys, x, x);
      Mat half = 0.5 * H.hessian(x);
      INFO("kind ", dg_kind_name(kind));
      CHECK(norm_inf(j - half) <= 1e-10 * (1.0 + norm_inf(half)));
    }
  }
}

TEST_CASE("symmetry flags match the definitions") {
  std::mt19937_64 rng(41);
  Polynomial H = random_poly(rng, 3, 4);
  SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
  Vec x = random_vec(rng, 3, -1.0, 1.0);
  Vec y = random_vec(rng, 3, -1.0, 1.0);
  for (DgKind kind : kAllKinds) {
    DiscreteGradient dg;
    dg.kind = kind;
    Vec a = dg_eval(dg, sys, x, y);
    Vec b = dg_eval(dg, sys, y, x);
    bool same = norm_inf(a - b) <= 1e-12 * (1.0 + norm_inf(a));
    CHECK(same == dg_is_symmetric(kind));
  }
}

TEST_CASE("averaged kind has identically antisymmetric-free Jacobian") {
  std::mt19937_64 rng(43);
  DiscreteGradient dg; // Avf
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial H = random_poly(rng, 4, 4);
    SkewGradientSystem sys = poly_system(H, random_antisym(rng, 4));
    Vec x = random_vec(rng, 4, -1.0, 1.0);
    Vec y = random_vec(rng, 4, -1.0, 1.0);
    Mat q = dg_q(dg, sys, x, y);
    CHECK(norm_inf(q) <= 1e-12);
  }
}

TEST_CASE("q is antisymmetric for every kind that has one") {
  std::mt19937_64 rng(47);
  Polynomial H = random_poly(rng, 3, 4);
  SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
  for (DgKind kind :
       {DgKind::Avf, DgKind::ItohAbe, DgKind::SymItohAbe, DgKind::Furihata}) {
    DiscreteGradient dg;
    dg.kind = kind;
    for (int trial = 0; trial < 10; ++trial) {
      Vec x = random_vec(rng, 3, -1.0, 1.0);
      Vec y = random_vec(rng, 3, -1.0, 1.0);
      CHECK(asym_defect(dg_q(dg, sys, x, y)) == 0.0);
    }
  }
}

TEST_CASE("finite-difference Jacobian oracle agrees with the analytic one") {
  std::mt19937_64 rng(53);
  Polynomial H = random_poly(rng, 3, 4);
  SkewGradientSystem sys = poly_system(H, random_antisym(rng, 3));
  DiscreteGradient dg; // Avf
  Vec x = random_vec(rng, 3, -0.5, 0.5);
  Vec y = random_vec(rng, 3, -0.5, 0.5);
  auto g = [&](const Vec& a, const Vec& b) { return dg_eval(dg, sys, a, b); };
  Mat fd = fd_jacobian2(g, x, y);
  Mat an = dg_jacobian2(dg, sys, x, y);
  CHECK(norm_inf(fd - an) <= 1e-6 * (1.0 + norm_inf(an)));
}

TEST_CASE("midpoint kind refuses its Jacobian") {
  std::mt19937_64 rng(59);
  Polynomial H = random_poly(rng, 2, 4);
  SkewGradientSystem sys = poly_system(H, random_antisym(rng, 2));
  DiscreteGradient dg;
  dg.kind = DgKind::GonzalezMidpoint;
  CHECK_FALSE(dg_has_jacobian(DgKind::GonzalezMidpoint));
  CHECK_THROWS_AS(dg_jacobian2(dg, sys, Vec{0.1, 0.2}, Vec{0.3, 0.4}),
                  ConfigError);
}

TEST_CASE("quadrature rules integrate polynomials exactly") {
  for (int n = 1; n <= 6; ++n) {
    const QuadRule& q = gauss_legendre_01(n);
    REQUIRE(static_cast<int>(q.node.size()) == n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += q.weight[i] * ipow(q.node[i], k);
      CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("kind names round trip") {
  for (DgKind kind : kAllKinds)
    CHECK(dg_kind_from_name(dg_kind_name(kind)) == kind);
  CHECK(dg_kind_names().size() == 5);
  CHECK_THROWS_AS(dg_kind_from_name("nope"), ConfigError);
}
