#pragma once
// Energy-preserving tree combinations and the numerical elementary
// differentials used to certify them. A combination pairs a tree with its
// stem-reversed mirror so that the transposed matrix chains cancel against
// the gradient; evaluating the signed sum of F(member).grad H at random
// points then gives a direct machine check of the cancellation.

#include <functional>
#include <utility>
#include <vector>

#include "dgflow/linalg.hpp"
#include "dgflow/trees.hpp"

namespace dgflow {

// Stem description plus the one or two realized member trees. Levels are
// numbered from the root; level k holds the derivative forest mu[k-1], for
// BiColored the S-direction forest eta[k-1], and for Shaped the atom shape
// tri[k-1] (true = antisymmetric Q atom). eta has one extra entry for the
// cap. Palindromic stems with positive mirror sign collapse to a single
// member; the negative palindromes vanish and are never produced.
struct EPCombination {
  TreeKind kind = TreeKind::Mono;
  int order = 0;
  std::vector<Forest> mu;
  std::vector<Forest> eta;
  std::vector<bool> tri;
  std::vector<std::pair<int, int>> members; // (sign, tree id)
};

// All distinct nonzero combinations of exactly the given order, deduplicated
// up to overall sign and member ordering. Caps: Mono order <= 6, BiColored
// and Shaped <= 4.
std::vector<EPCombination> ep_combinations(TreePool& pool, int order,
                                           TreeKind kind);

// Single combination from explicit stem data, for spot checks beyond the
// enumeration caps. Throws ConfigError if the combination vanishes
// identically (palindromic stem with negative mirror sign).
EPCombination ep_from_stem(TreePool& pool, TreeKind kind,
                           std::vector<Forest> mu, std::vector<Forest> eta,
                           std::vector<bool> tri);

// Callables a differential evaluation needs. Derivatives are taken with
// nested five-point central stencils of width eps, exact for polynomial data
// of degree <= 4 per direction; supply polynomial H and S of at most that
// degree when bit-level accuracy matters.
struct DifferentialContext {
  int dim = 0;
  std::function<Vec(const Vec&)> grad_h;
  std::function<Mat(const Vec&)> skew;
  // Q(x,y); only consulted for Shaped trees.
  std::function<Mat(const Vec&, const Vec&)> qmap;
  double eps = 0.5;
};

// k-th mixed directional derivative of g at x along dirs (empty dirs = g(x)).
Vec dir_derivative(const std::function<Vec(const Vec&)>& g, const Vec& x,
                   const std::vector<Vec>& dirs, double eps);

// F(tau)(x) by the per-node recursion. Mono and BiColored accept every tree.
// Shaped trees are accepted when each Q atom has a single child; wider Q
// atoms need the stem data to fix their argument slot, see ep_defect.
Vec elementary_differential(const DifferentialContext& ctx,
                            const TreePool& pool, int tree, const Vec& x);

struct DefectResult {
  double value = 0; // signed sum of F(member).grad H
  double scale = 0; // sum of |F(member)| * |grad H|
};

// Shaped members evaluate through the stem matrix chain
// S A1 S A2 ... An S grad H, everything else through the tree recursion.
DefectResult ep_defect(const DifferentialContext& ctx, const TreePool& pool,
                       const EPCombination& comb, const Vec& x);

} // namespace dgflow
