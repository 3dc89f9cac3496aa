#pragma once
// Formal expansions of the one-step map in rooted trees, and the
// order-condition checker built on them. Three series kinds:
//   B: plain trees; models a constant skew matrix with the averaged gradient
//      (terms carrying a Q atom drop out since Q vanishes there).
//   P: bi-colored trees; state-dependent skew matrix, averaged gradient.
//   G: shaped trees; constant skew matrix, arbitrary discrete gradient
//      (triangle nodes stand for Q atoms).
// The scheme coefficient map Phi is assembled node by node: every node of the
// (black) cut tree contributes a product of a cap factor theta and a stem sum
// over matching scheme terms, taken forward plus sign-weighted reversed.

#include <memory>
#include <string>
#include <vector>

#include "dgflow/sbar.hpp"
#include "dgflow/trees.hpp"
#include "dgflow/value.hpp"

namespace dgflow {

enum class SeriesKind { B, P, G };

SeriesKind series_from_name(const std::string& name); // b|p|g
const char* series_name(SeriesKind s);
TreeKind series_tree_kind(SeriesKind s);
int series_max_order(SeriesKind s); // 6 for B, 4 for P and G

// Tree id -> coefficient; defined for trees of one kind up to a max order
// (black-rooted ones for the bi-colored kind).
struct CoefficientMap {
  Value empty;                // value on the empty tree
  std::vector<Value> by_tree; // indexed by pool id; unset entries are zero
  Value on_tree(int id) const;
};

struct SeriesExpansion {
  SeriesKind series = SeriesKind::B;
  int max_order = 0;
  std::shared_ptr<TreePool> pool;
  CoefficientMap phi;                // the scheme's one-step coefficients
  CoefficientMap x, xhat, xbar;      // base-point maps
  std::vector<CoefficientMap> stage; // one per scheme stage

  // Product over the forest of the given map's values, with white roots
  // recolored black first.
  Value map_on_forest(const CoefficientMap& m, const Forest& f) const;
};

// Expands the scheme up to max_order (1 <= max_order <= series cap).
SeriesExpansion scheme_phi(const SbarScheme& scheme, int max_order,
                           SeriesKind series);

// Stage series alone; same computation, exposed for direct inspection.
std::vector<CoefficientMap> stage_weights(const SbarScheme& scheme,
                                          int max_order, SeriesKind series);

struct OrderConditionRow {
  int tree = -1;
  int order = 0;
  std::string encoding;
  double phi = 0;
  double target = 0;
  double residual = 0;
  // Rows whose differential carries a Q(x,x) factor; skipped in the verdict
  // when the scheme declares a symmetric discrete gradient.
  bool exempt = false;
};

struct OrderReport {
  std::string scheme;
  SeriesKind series = SeriesKind::B;
  int order = 0;
  double tolerance = 1e-12;
  std::vector<OrderConditionRow> rows;
  double max_residual = 0; // over non-exempt rows
  bool pass = false;
};

// Conditions for every tree of order <= p: Phi(tau) = 1/gamma(tau) for the B
// and P kinds; for G the target is 1/gamma on all-circle trees and 0 on
// triangle-bearing ones.
OrderReport check_order(const SbarScheme& scheme, int p, SeriesKind series,
                        double tolerance = 1e-12);

// CSV: tree,order,phi,target,residual,exempt (with header).
void write_order_report_csv(const std::string& path, const OrderReport& rep);
std::string order_report_csv(const OrderReport& rep);

} // namespace dgflow
