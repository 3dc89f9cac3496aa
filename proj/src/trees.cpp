#include "dgflow/trees.hpp"

#include <algorithm>

#include "dgflow/errors.hpp"

namespace dgflow {

TreeKind tree_kind_from_name(const std::string& name) {
  if (name == "mono") return TreeKind::Mono;
  if (name == "bicolored") return TreeKind::BiColored;
  if (name == "shaped") return TreeKind::Shaped;
  throw ConfigError("unknown tree kind '" + name +
                    "' (expected mono, bicolored or shaped)");
}

const char* tree_kind_name(TreeKind k) {
  switch (k) {
    case TreeKind::Mono: return "mono";
    case TreeKind::BiColored: return "bicolored";
    case TreeKind::Shaped: return "shaped";
  }
  return "?";
}

int TreePool::lookup(const std::string& enc) const {
  auto it = std::lower_bound(
      index_.begin(), index_.end(), enc,
      [](const std::pair<std::string, int>& a, const std::string& b) {
        return a.first < b;
      });
  if (it != index_.end() && it->first == enc) return it->second;
  return -1;
}

int TreePool::intern(bool white, bool triangle, std::vector<int> kids) {
  std::sort(kids.begin(), kids.end(), [this](int a, int b) {
    const TreeNode& na = nodes_[a];
    const TreeNode& nb = nodes_[b];
    if (na.order != nb.order) return na.order < nb.order;
    return na.enc < nb.enc;
  });

  TreeNode n;
  n.white = white;
  n.triangle = triangle;
  n.kids = kids;
  n.enc = triangle ? "t" : (white ? "w" : "o");
  if (!kids.empty()) {
    n.enc += '(';
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) n.enc += ',';
      n.enc += nodes_[kids[i]].enc;
    }
    n.enc += ')';
  }
  int found = lookup(n.enc);
  if (found >= 0) return found;

  n.order = 1;
  n.sigma = 1;
  n.gamma = 1;
  for (size_t i = 0; i < kids.size(); ++i) {
    const TreeNode& k = nodes_[kids[i]];
    n.order += k.order;
    n.sigma *= k.sigma;
    n.gamma *= k.gamma;
    // multiplicity factor: kids are sorted, equal ids are adjacent
    long long run = 1;
    while (i + 1 < kids.size() && kids[i + 1] == kids[i]) {
      ++i;
      ++run;
      n.order += k.order;
      n.sigma *= k.sigma;
      n.gamma *= k.gamma;
      n.sigma *= run;
    }
  }
  n.gamma *= n.order;

  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  auto pos = std::lower_bound(
      index_.begin(), index_.end(), nodes_.back().enc,
      [](const std::pair<std::string, int>& a, const std::string& b) {
        return a.first < b;
      });
  index_.insert(pos, {nodes_.back().enc, id});
  return id;
}

int TreePool::leaf(bool white) { return intern(white, false, {}); }

const TreeNode& TreePool::at(int id) const { return nodes_.at(id); }

void TreePool::append_forests(TreeKind kind, int total, int min_index,
                              std::vector<int>& cur,
                              std::vector<Forest>& out) {
  if (total == 0) {
    Forest f = cur;
    std::sort(f.begin(), f.end());
    out.push_back(std::move(f));
    return;
  }
  // candidates: all trees of the kind with order <= total, in a fixed global
  // sequence (by order, then enumeration position); min_index makes the
  // multiset non-decreasing and thus unique.
  int idx = 0;
  for (int ord = 1; ord <= total; ++ord) {
    // copy: recursive enumeration below may grow the cache this referenced
    const std::vector<int> ts = trees_of_order(kind, ord);
    for (int id : ts) {
      if (idx >= min_index) {
        cur.push_back(id);
        append_forests(kind, total - ord, idx, cur, out);
        cur.pop_back();
      }
      ++idx;
    }
  }
}

std::vector<Forest> TreePool::forests_of_total(TreeKind kind, int total) {
  std::vector<Forest> out;
  std::vector<int> cur;
  append_forests(kind, total, 0, cur, out);
  return out;
}

const std::vector<int>& TreePool::trees_of_order(TreeKind kind, int order) {
  if (order < 1 || order > 8)
    throw ConfigError("tree order must be in [1, 8]");
  std::vector<std::vector<int>>& cache = by_order_[static_cast<int>(kind)];
  if (static_cast<int>(cache.size()) >= order &&
      !cache[order - 1].empty())
    return cache[order - 1];
  if (static_cast<int>(cache.size()) < order) cache.resize(order);

  std::vector<int> ids;
  if (order == 1) {
    switch (kind) {
      case TreeKind::Mono:
      case TreeKind::Shaped:
        ids.push_back(leaf(false)); // no triangle leaves
        break;
      case TreeKind::BiColored:
        ids.push_back(leaf(false));
        ids.push_back(leaf(true));
        break;
    }
  } else {
    std::vector<Forest> forests = forests_of_total(kind, order - 1);
    for (const Forest& f : forests) {
      switch (kind) {
        case TreeKind::Mono:
          ids.push_back(intern(false, false, f));
          break;
        case TreeKind::BiColored:
          ids.push_back(intern(false, false, f));
          ids.push_back(intern(true, false, f));
          break;
        case TreeKind::Shaped:
          ids.push_back(intern(false, false, f));
          ids.push_back(intern(false, true, f));
          break;
      }
    }
  }
  cache[order - 1] = std::move(ids);
  return cache[order - 1];
}

std::vector<int> TreePool::black_rooted(TreeKind kind, int order) {
  std::vector<int> out;
  for (int id : trees_of_order(kind, order))
    if (!nodes_[id].white) out.push_back(id);
  return out;
}

int TreePool::recolor_root_black(int id) {
  const TreeNode& n = nodes_.at(id);
  if (!n.white) return id;
  std::vector<int> kids = n.kids;
  return intern(false, n.triangle, std::move(kids));
}

bool TreePool::has_lone_triangle(int id) const {
  const TreeNode& n = nodes_.at(id);
  if (n.triangle && n.kids.size() == 1) return true;
  for (int k : n.kids)
    if (has_lone_triangle(k)) return true;
  return false;
}

int TreePool::forest_order(const Forest& f) const {
  int total = 0;
  for (int id : f) total += nodes_.at(id).order;
  return total;
}

std::string TreePool::forest_str(const Forest& f) const {
  std::string s = "{";
  for (size_t i = 0; i < f.size(); ++i) {
    if (i) s += ',';
    s += nodes_.at(f[i]).enc;
  }
  s += '}';
  return s;
}

std::vector<int> enumerate_trees(TreePool& pool, int order, TreeKind kind) {
  if (order < 1 || order > 8)
    throw ConfigError("tree order must be in [1, 8]");
  if (kind == TreeKind::BiColored) return pool.black_rooted(kind, order);
  return pool.trees_of_order(kind, order);
}

} // namespace dgflow
