#include "dgflow/epcomb.hpp"

#include <algorithm>
#include <tuple>

#include "dgflow/errors.hpp"

namespace dgflow {

namespace {

// ---- enumeration ----------------------------------------------------------

int max_ep_order(TreeKind kind) { return kind == TreeKind::Mono ? 6 : 4; }

// Trees allowed inside the stem forests. BiColored splits by root color:
// derivative forests take black roots, S-direction forests white roots.
std::vector<int> forest_candidates(TreePool& pool, TreeKind kind, int max_ord,
                                   bool white_rooted) {
  std::vector<int> out;
  for (int q = 1; q <= max_ord; ++q)
    for (int id : pool.trees_of_order(kind, q))
      if (pool.at(id).white == white_rooted) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

// Multisets with non-decreasing candidate index; canonical and duplicate-free.
void forests_rec(const TreePool& pool, const std::vector<int>& cand,
                 int remaining, size_t from, Forest& cur,
                 std::vector<Forest>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (size_t i = from; i < cand.size(); ++i) {
    int w = pool.at(cand[i]).order;
    if (w > remaining) continue;
    cur.push_back(cand[i]);
    forests_rec(pool, cand, remaining - w, i, cur, out);
    cur.pop_back();
  }
}

std::vector<Forest> forests_of(const TreePool& pool,
                               const std::vector<int>& cand, int total) {
  std::vector<Forest> out;
  Forest cur;
  forests_rec(pool, cand, total, 0, cur, out);
  return out;
}

struct StemData {
  std::vector<Forest> mu;
  std::vector<Forest> eta;
  std::vector<bool> tri;

  bool operator==(const StemData& o) const {
    return mu == o.mu && eta == o.eta && tri == o.tri;
  }
  bool operator<(const StemData& o) const {
    return std::tie(mu, eta, tri) < std::tie(o.mu, o.eta, o.tri);
  }
};

StemData mirrored(const StemData& d) {
  StemData m = d;
  std::reverse(m.mu.begin(), m.mu.end());
  std::reverse(m.eta.begin(), m.eta.end());
  std::reverse(m.tri.begin(), m.tri.end());
  return m;
}

int mirror_sign(TreeKind kind, const StemData& d) {
  if (kind == TreeKind::Shaped) {
    int circles = 0;
    for (bool t : d.tri)
      if (!t) ++circles;
    return circles % 2 == 0 ? 1 : -1;
  }
  return d.mu.size() % 2 == 0 ? 1 : -1;
}

// Realize the stem as a tree: cap first, then wrap one level at a time.
int build_member(TreePool& pool, TreeKind kind, const StemData& d) {
  size_t n = d.mu.size();
  Forest kids = kind == TreeKind::BiColored ? d.eta[n] : Forest{};
  int t = pool.intern(false, false, kids);
  for (size_t k = n; k-- > 0;) {
    kids = d.mu[k];
    if (kind == TreeKind::BiColored)
      kids.insert(kids.end(), d.eta[k].begin(), d.eta[k].end());
    kids.push_back(t);
    t = pool.intern(false, kind == TreeKind::Shaped && d.tri[k], kids);
  }
  return t;
}

EPCombination realize(TreePool& pool, TreeKind kind, int order,
                      const StemData& d) {
  StemData m = mirrored(d);
  int sign = mirror_sign(kind, d);
  if (m == d && sign < 0)
    throw ConfigError("stem combination vanishes identically");
  EPCombination c;
  c.kind = kind;
  c.order = order;
  c.mu = d.mu;
  c.eta = d.eta;
  c.tri = d.tri;
  c.members.emplace_back(1, build_member(pool, kind, d));
  if (!(m == d)) c.members.emplace_back(sign, build_member(pool, kind, m));
  return c;
}

// every way to spread `total` decoration order over the open slots
void assign_slots(TreePool& pool, const std::vector<std::vector<Forest>*>& slot,
                  const std::vector<const std::vector<int>*>& cand, size_t i,
                  int total, const std::function<void()>& done) {
  if (i == slot.size()) {
    if (total == 0) done();
    return;
  }
  for (int give = 0; give <= total; ++give) {
    // last slot must absorb the remainder
    if (i + 1 == slot.size() && give != total) continue;
    for (const Forest& f : forests_of(pool, *cand[i], give)) {
      slot[i]->push_back(f);
      assign_slots(pool, slot, cand, i + 1, total - give, done);
      slot[i]->pop_back();
    }
  }
}

} // namespace

std::vector<EPCombination> ep_combinations(TreePool& pool, int order,
                                           TreeKind kind) {
  if (order < 1 || order > max_ep_order(kind))
    throw ConfigError("combination order must be in [1, " +
                      std::to_string(max_ep_order(kind)) + "] for " +
                      std::string(tree_kind_name(kind)) + " trees");

  std::vector<int> black = forest_candidates(pool, kind, order, false);
  std::vector<int> white = kind == TreeKind::BiColored
                               ? forest_candidates(pool, kind, order, true)
                               : std::vector<int>{};

  std::vector<EPCombination> out;
  for (int n = 0; n + 1 <= order; ++n) {
    int budget = order - (n + 1);
    StemData d;
    std::vector<std::vector<Forest>*> slot;
    std::vector<const std::vector<int>*> cand;
    for (int k = 0; k < n; ++k) {
      slot.push_back(&d.mu);
      cand.push_back(&black);
    }
    if (kind == TreeKind::BiColored)
      for (int k = 0; k <= n; ++k) {
        slot.push_back(&d.eta);
        cand.push_back(&white);
      }
    if (slot.empty() && budget != 0) continue;

    // slot vectors fill in declaration order: mu[0..n-1], then eta[0..n]
    auto emit_shapes = [&] {
      StemData m = mirrored(d);
      if (m < d) return; // mirror image already emitted
      if (!(m == d && mirror_sign(kind, d) < 0))
        out.push_back(realize(pool, kind, order, d));
    };
    auto emit = [&] {
      if (kind != TreeKind::Shaped) {
        emit_shapes();
        return;
      }
      d.tri.assign(static_cast<size_t>(n), false);
      for (unsigned bits = 0; bits < (1u << n); ++bits) {
        for (int k = 0; k < n; ++k) d.tri[k] = (bits >> k) & 1u;
        emit_shapes();
      }
      d.tri.clear();
    };
    assign_slots(pool, slot, cand, 0, budget, emit);
  }
  return out;
}

EPCombination ep_from_stem(TreePool& pool, TreeKind kind,
                           std::vector<Forest> mu, std::vector<Forest> eta,
                           std::vector<bool> tri) {
  StemData d{std::move(mu), std::move(eta), std::move(tri)};
  size_t n = d.mu.size();
  if (kind == TreeKind::BiColored ? d.eta.size() != n + 1 : !d.eta.empty())
    throw ConfigError("stem needs one S-direction forest per level plus cap");
  if (kind == TreeKind::Shaped ? d.tri.size() != n : !d.tri.empty())
    throw ConfigError("stem needs one shape flag per level");
  int order = static_cast<int>(n) + 1;
  for (const Forest& f : d.mu) order += pool.forest_order(f);
  for (const Forest& f : d.eta) order += pool.forest_order(f);
  return realize(pool, kind, order, d);
}

// ---- differentials --------------------------------------------------------

namespace {

// Five-point first-derivative stencil along each direction in turn, scaled
// by the direction norms (the derivative is multilinear in the directions).
template <typename T, typename G>
T nested_stencil(const G& g, const Vec& x, const std::vector<Vec>& dirs,
                 size_t k, double eps) {
  if (k == 0) return g(x);
  const Vec& d = dirs[k - 1];
  double nd = norm_inf(d);
  if (nd == 0.0) return 0.0 * nested_stencil<T>(g, x, dirs, k - 1, eps);
  Vec u = (1.0 / nd) * d;
  auto shifted = [&](double t) {
    Vec xs = x;
    axpy(t * eps, u, xs);
    return nested_stencil<T>(g, xs, dirs, k - 1, eps);
  };
  T v = shifted(-2.0) - 8.0 * shifted(-1.0) + 8.0 * shifted(1.0) -
        shifted(2.0);
  return (nd / (12.0 * eps)) * v;
}

Mat dir_derivative_mat(const std::function<Mat(const Vec&)>& g, const Vec& x,
                       const std::vector<Vec>& dirs, double eps) {
  return nested_stencil<Mat>(g, x, dirs, dirs.size(), eps);
}

Vec stem_chain(const DifferentialContext& ctx, const TreePool& pool,
               const std::vector<Forest>& mu, const std::vector<bool>& tri,
               const Vec& x) {
  Mat s = ctx.skew(x);
  Vec v = matvec(s, ctx.grad_h(x));
  for (size_t k = mu.size(); k-- > 0;) {
    std::vector<Vec> dirs;
    for (int id : mu[k])
      dirs.push_back(elementary_differential(ctx, pool, id, x));
    if (!tri.empty() && tri[k]) {
      // y-slot derivatives of Q(x,y) at y=x, applied to the running vector
      auto qv = [&](const Vec& y) { return matvec(ctx.qmap(x, y), v); };
      v = dir_derivative(qv, x, dirs, ctx.eps);
    } else {
      // one extra gradient derivative along v plays the Hessian product
      dirs.push_back(v);
      v = dir_derivative(ctx.grad_h, x, dirs, ctx.eps);
    }
    v = matvec(s, v);
  }
  return v;
}

} // namespace

Vec dir_derivative(const std::function<Vec(const Vec&)>& g, const Vec& x,
                   const std::vector<Vec>& dirs, double eps) {
  return nested_stencil<Vec>(g, x, dirs, dirs.size(), eps);
}

Vec elementary_differential(const DifferentialContext& ctx,
                            const TreePool& pool, int tree, const Vec& x) {
  const TreeNode& nd = pool.at(tree);
  std::vector<Vec> wv, bv;
  for (int kid : nd.kids) {
    Vec f = elementary_differential(ctx, pool, kid, x);
    (pool.at(kid).white ? wv : bv).push_back(std::move(f));
  }
  if (nd.triangle) {
    if (bv.size() != 1)
      throw ConfigError(
          "Q atom with several children has no canonical argument slot; "
          "evaluate through its stem combination instead");
    return matvec(ctx.skew(x), matvec(ctx.qmap(x, x), bv[0]));
  }
  Mat s = dir_derivative_mat(ctx.skew, x, wv, ctx.eps);
  Vec g = dir_derivative(ctx.grad_h, x, bv, ctx.eps);
  return matvec(s, g);
}

DefectResult ep_defect(const DifferentialContext& ctx, const TreePool& pool,
                       const EPCombination& comb, const Vec& x) {
  Vec g = ctx.grad_h(x);
  double gn = norm_inf(g);
  DefectResult r;
  for (size_t m = 0; m < comb.members.size(); ++m) {
    Vec f;
    if (comb.kind == TreeKind::Shaped) {
      std::vector<Forest> mu = comb.mu;
      std::vector<bool> tri = comb.tri;
      if (m == 1) {
        std::reverse(mu.begin(), mu.end());
        std::reverse(tri.begin(), tri.end());
      }
      f = stem_chain(ctx, pool, mu, tri, x);
    } else {
      f = elementary_differential(ctx, pool, comb.members[m].second, x);
    }
    r.value += comb.members[m].first * dot(f, g);
    r.scale += norm_inf(f) * gn;
  }
  return r;
}

} // namespace dgflow
