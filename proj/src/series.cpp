#include "dgflow/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dgflow/errors.hpp"

namespace dgflow {

SeriesKind series_from_name(const std::string& name) {
  if (name == "b") return SeriesKind::B;
  if (name == "p") return SeriesKind::P;
  if (name == "g") return SeriesKind::G;
  throw ConfigError("unknown series kind '" + name + "' (expected b, p or g)");
}

const char* series_name(SeriesKind s) {
  switch (s) {
    case SeriesKind::B: return "b";
    case SeriesKind::P: return "p";
    case SeriesKind::G: return "g";
  }
  return "?";
}

TreeKind series_tree_kind(SeriesKind s) {
  switch (s) {
    case SeriesKind::B: return TreeKind::Mono;
    case SeriesKind::P: return TreeKind::BiColored;
    case SeriesKind::G: return TreeKind::Shaped;
  }
  return TreeKind::Mono;
}

int series_max_order(SeriesKind s) { return s == SeriesKind::B ? 6 : 4; }

Value CoefficientMap::on_tree(int id) const {
  if (id < 0 || id >= static_cast<int>(by_tree.size())) return Value();
  return by_tree[id];
}

namespace {

// One scheme term in stem form: coefficient, atom points, atom shapes
// (true = Q), and the n+1 skew points around the atoms.
struct StemEntry {
  Value b;
  std::vector<StageRef> fpts;
  std::vector<bool> q;
  std::vector<StageRef> spts;
};

struct Expander {
  const SbarScheme& scheme;
  SeriesKind series;
  TreeKind kind;
  int max_order;
  TreePool& pool;

  std::vector<StemEntry> entries;
  std::vector<Value> phi;                // by tree id
  std::vector<std::vector<Value>> stage; // [stage][tree id]

  Expander(const SbarScheme& s, SeriesKind se, int mo, TreePool& p)
      : scheme(s), series(se), kind(series_tree_kind(se)), max_order(mo),
        pool(p) {
    scheme.validate();
    for (const SbarTerm& t : scheme.terms) {
      bool has_q = false;
      for (const Factor& f : t.factors)
        if (f.shape == Factor::Q) has_q = true;
      // Under the averaged gradient Q vanishes, so the mono and bi-colored
      // expansions drop those terms entirely.
      if (has_q && series != SeriesKind::G) continue;
      StemEntry e;
      e.b = t.b;
      for (const Factor& f : t.factors) {
        e.fpts.push_back(f.at);
        e.q.push_back(f.shape == Factor::Q);
      }
      e.spts = t.skew_at;
      entries.push_back(std::move(e));
    }
  }

  Value map_on_tree(const StageRef& r, int id) {
    id = pool.recolor_root_black(id);
    switch (r.kind) {
      case StageRef::X: return Value();
      case StageRef::XHAT: return phi[id];
      case StageRef::XBAR: return phi[id] * Value(1, 2);
      case StageRef::STAGE: return stage[r.index][id];
    }
    return Value();
  }

  Value map_on_forest(const StageRef& r, const Forest& f) {
    Value v = Value::integer(1);
    for (int id : f) v = v * map_on_tree(r, id);
    return v;
  }

  // Series of h*f at the given point: empty product over the children, zero
  // on triangle-rooted trees (the field itself has no Q atom).
  Value fmap_on_tree(const StageRef& r, int id) {
    const TreeNode& nd = pool.at(id);
    if (nd.triangle) return Value();
    Value v = Value::integer(1);
    for (int kid : nd.kids) v = v * map_on_tree(r, kid);
    return v;
  }

  // Cap factor: 1/(m+1) * prod Phi for circles, -2m/(m+1) * prod Phi for
  // triangles, over the cap's black children.
  Value theta(const TreeNode& cap, const Forest& mu) {
    long long m = static_cast<long long>(mu.size());
    Value v = cap.triangle ? Value(-2 * m, m + 1) : Value(1, m + 1);
    for (int id : mu) v = v * phi[id];
    return v;
  }

  struct StemLevel {
    bool tri = false;
    Forest mu;
    Forest eta;
  };

  bool key_matches(const StemEntry& e, const std::vector<StemLevel>& stem,
                   bool reversed) const {
    size_t n = stem.size();
    if (e.fpts.size() != n) return false;
    if (series != SeriesKind::G) return true;
    for (size_t k = 0; k < n; ++k)
      if (e.q[reversed ? n - 1 - k : k] != stem[k].tri) return false;
    return true;
  }

  // Stem sum at one cut-tree node: forward products plus sign-weighted
  // reversed products over all matching terms.
  Value stem_sum(const std::vector<StemLevel>& stem, const Forest& eta_cap) {
    size_t n = stem.size();
    int hess_in_stem = 0;
    for (const StemLevel& l : stem)
      if (!l.tri) ++hess_in_stem;
    // Mono/bi-colored stems are all Hessian-shaped; the general rule is one
    // sign flip per Hessian atom.
    bool negate = (series == SeriesKind::G ? hess_in_stem : (int)n) % 2 != 0;

    Value total;
    for (const StemEntry& e : entries) {
      if (key_matches(e, stem, false)) {
        Value c = e.b;
        for (size_t k = 0; k < n; ++k)
          c = c * map_on_forest(e.fpts[k], stem[k].mu);
        if (series == SeriesKind::P) {
          for (size_t k = 0; k < n; ++k)
            c = c * map_on_forest(e.spts[k], stem[k].eta);
          c = c * map_on_forest(e.spts[n], eta_cap);
        }
        total = total + c;
      }
      if (key_matches(e, stem, true)) {
        Value c = e.b;
        for (size_t k = 0; k < n; ++k)
          c = c * map_on_forest(e.fpts[n - 1 - k], stem[k].mu);
        if (series == SeriesKind::P) {
          for (size_t k = 0; k < n; ++k)
            c = c * map_on_forest(e.spts[n - k], stem[k].eta);
          c = c * map_on_forest(e.spts[0], eta_cap);
        }
        total = negate ? total - c : total + c;
      }
    }
    return total;
  }

  // Sum of node contributions over the cut tree (nodes reachable from the
  // root without passing through a white node).
  Value phi_of(int id) {
    std::vector<StemLevel> stem;
    return visit(id, stem);
  }

  Value visit(int id, std::vector<StemLevel>& stem) {
    const TreeNode& nd = pool.at(id);
    Forest mu, eta;
    for (int kid : nd.kids)
      (pool.at(kid).white ? eta : mu).push_back(kid);

    Value total = theta(nd, mu) * stem_sum(stem, eta);

    for (size_t c = 0; c < mu.size(); ++c) {
      if (c > 0 && mu[c] == mu[c - 1]) continue; // symmetric copy, folded below
      long long copies = 1;
      while (c + copies < mu.size() && mu[c + copies] == mu[c]) ++copies;
      StemLevel lvl;
      lvl.tri = nd.triangle;
      lvl.eta = eta;
      for (size_t j = 0; j < mu.size(); ++j)
        if (j != c) lvl.mu.push_back(mu[j]);
      stem.push_back(std::move(lvl));
      // equal siblings sit at symmetric positions and contribute equally
      total = total + Value::integer(copies) * visit(mu[c], stem);
      stem.pop_back();
    }
    return total;
  }

  void run() {
    // make sure every tree up to max_order is interned before sizing tables
    for (int q = 1; q <= max_order; ++q) pool.trees_of_order(kind, q);
    phi.assign(pool.size() + 16, Value());
    stage.assign(scheme.stages.size(),
                 std::vector<Value>(pool.size() + 16, Value()));

    for (int q = 1; q <= max_order; ++q) {
      std::vector<int> ts = pool.black_rooted(kind, q);
      for (int id : ts) phi[id] = phi_of(id);
      for (size_t s = 0; s < scheme.stages.size(); ++s) {
        const StageDef& def = scheme.stages[s];
        for (int id : ts) {
          Value v;
          for (const auto& [a, ref] : def.lin)
            v = v + a * map_on_tree(ref, id);
          for (const auto& [c, ref] : def.field)
            v = v + c * fmap_on_tree(ref, id);
          stage[s][id] = v;
        }
      }
    }
  }
};

} // namespace

Value SeriesExpansion::map_on_forest(const CoefficientMap& m,
                                     const Forest& f) const {
  Value v = Value::integer(1);
  for (int id : f) v = v * m.on_tree(pool->recolor_root_black(id));
  return v;
}

SeriesExpansion scheme_phi(const SbarScheme& scheme, int max_order,
                           SeriesKind series) {
  if (max_order < 1 || max_order > series_max_order(series))
    throw ConfigError("series order must be in [1, " +
                      std::to_string(series_max_order(series)) + "] for the " +
                      series_name(series) + " kind");
  SeriesExpansion out;
  out.series = series;
  out.max_order = max_order;
  out.pool = std::make_shared<TreePool>();
  Expander ex(scheme, series, max_order, *out.pool);
  ex.run();

  out.phi.empty = Value::integer(1);
  out.phi.by_tree = ex.phi;
  out.x.empty = Value::integer(1);
  out.x.by_tree.assign(ex.phi.size(), Value());
  out.xhat = out.phi;
  out.xbar.empty = Value::integer(1);
  out.xbar.by_tree.resize(ex.phi.size());
  for (size_t i = 0; i < ex.phi.size(); ++i)
    out.xbar.by_tree[i] = ex.phi[i] * Value(1, 2);
  out.stage.resize(ex.stage.size());
  for (size_t s = 0; s < ex.stage.size(); ++s) {
    out.stage[s].empty = Value::integer(1);
    out.stage[s].by_tree = ex.stage[s];
  }
  return out;
}

std::vector<CoefficientMap> stage_weights(const SbarScheme& scheme,
                                          int max_order, SeriesKind series) {
  return scheme_phi(scheme, max_order, series).stage;
}

OrderReport check_order(const SbarScheme& scheme, int p, SeriesKind series,
                        double tolerance) {
  SeriesExpansion ex = scheme_phi(scheme, p, series);
  TreeKind kind = series_tree_kind(series);

  OrderReport rep;
  rep.scheme = scheme.name;
  rep.series = series;
  rep.order = p;
  rep.tolerance = tolerance;

  bool exempt_lone_triangles =
      series == SeriesKind::G && scheme.requires_symmetric_dg;

  for (int q = 1; q <= p; ++q) {
    for (int id : ex.pool->black_rooted(kind, q)) {
      const TreeNode& nd = ex.pool->at(id);
      OrderConditionRow row;
      row.tree = id;
      row.order = q;
      row.encoding = nd.enc;
      row.phi = ex.phi.on_tree(id).to_double();
      bool all_circle = nd.enc.find('t') == std::string::npos;
      row.target = (series != SeriesKind::G || all_circle)
                       ? 1.0 / static_cast<double>(nd.gamma)
                       : 0.0;
      row.residual = std::fabs(row.phi - row.target);
      row.exempt = exempt_lone_triangles && ex.pool->has_lone_triangle(id);
      if (!row.exempt && row.residual > rep.max_residual)
        rep.max_residual = row.residual;
      rep.rows.push_back(std::move(row));
    }
  }
  rep.pass = rep.max_residual <= tolerance;
  return rep;
}

std::string order_report_csv(const OrderReport& rep) {
  std::string out = "tree,order,phi,target,residual,exempt\n";
  char buf[256];
  for (const OrderConditionRow& r : rep.rows) {
    // tree encodings contain commas; quote them
    std::snprintf(buf, sizeof(buf), ",%d,%.17g,%.17g,%.17g,%d\n", r.order,
                  r.phi, r.target, r.residual, r.exempt ? 1 : 0);
    out += '"' + r.encoding + '"' + buf;
  }
  return out;
}

void write_order_report_csv(const std::string& path, const OrderReport& rep) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file " + path);
  f << order_report_csv(rep);
}

} // namespace dgflow
