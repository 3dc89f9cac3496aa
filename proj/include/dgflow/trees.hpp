#pragma once
// Rooted trees for the order-condition calculus. Three families share one
// node type: plain trees (all nodes black circles), bi-colored trees (black
// and white circles), and shaped trees (black circles and triangles, where a
// triangle always carries at least one child). Trees are interned in a pool:
// children are kept sorted by (order, encoding), so structurally equal trees
// get the same id and forests are plain sorted id vectors.

#include <string>
#include <vector>

namespace dgflow {

enum class TreeKind { Mono, BiColored, Shaped };

TreeKind tree_kind_from_name(const std::string& name); // mono|bicolored|shaped
const char* tree_kind_name(TreeKind k);

struct TreeNode {
  bool white = false;    // bi-colored family
  bool triangle = false; // shaped family
  std::vector<int> kids; // interned ids, sorted by (order, encoding)
  int order = 1;         // total node count
  long long sigma = 1;   // symmetry coefficient
  long long gamma = 1;   // density
  std::string enc;       // canonical text form, e.g. "o(o,w)"
};

// Sorted multiset of interned tree ids.
using Forest = std::vector<int>;

class TreePool {
 public:
  // Canonicalizes (sorts kids) and dedups; returns the id.
  int intern(bool white, bool triangle, std::vector<int> kids);
  int leaf(bool white = false);

  const TreeNode& at(int id) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // All distinct trees of exactly this order, enumerated once and cached.
  // For BiColored this spans both root colors; black_rooted() filters to the
  // subset used in condition tables.
  const std::vector<int>& trees_of_order(TreeKind kind, int order);
  std::vector<int> black_rooted(TreeKind kind, int order);

  // Identity for black-rooted input; coefficient maps evaluate white-rooted
  // trees through this.
  int recolor_root_black(int id);

  // True when some node is a triangle with exactly one child. Those carry a
  // Q(x,x) factor, which vanishes for symmetric discrete gradients.
  bool has_lone_triangle(int id) const;

  int forest_order(const Forest& f) const;
  std::string forest_str(const Forest& f) const;

 private:
  void append_forests(TreeKind kind, int total, int min_index,
                      std::vector<int>& cur, std::vector<Forest>& out);
  std::vector<Forest> forests_of_total(TreeKind kind, int total);

  std::vector<TreeNode> nodes_;
  // enc -> id; enc encodes color/shape/children completely.
  std::vector<std::pair<std::string, int>> index_; // sorted by enc
  // cache: [kind][order] -> ids
  std::vector<std::vector<int>> by_order_[3];
  int lookup(const std::string& enc) const;
};

// order out of [1, 8] is refused with ConfigError.
std::vector<int> enumerate_trees(TreePool& pool, int order, TreeKind kind);

} // namespace dgflow
