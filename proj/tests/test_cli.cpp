#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgflow/bench.hpp"
#include "dgflow/errors.hpp"
#include "dgflow/problem_io.hpp"
#include "dgflow/series.hpp"
#include "dgflow/trees.hpp"

using namespace dgflow;

// The command-line surface is a thin layer over the name-resolution helpers;
// these tests pin down the names it accepts and the errors it reports.

TEST_CASE("every catalog name resolves to itself") {
  for (const std::string& n : builtin_problem_names()) {
    CHECK(resolve_problem(n).name == n);
  }
  for (const std::string& n : builtin_scheme_names()) {
    CHECK(resolve_scheme(n).name == n);
  }
  for (const std::string& n : dg_kind_names()) {
    CHECK(dg_kind_name(dg_kind_from_name(n)) == n);
  }
}

TEST_CASE("unknown names fail with the configuration error type") {
  CHECK_THROWS_AS(resolve_problem("unobtainium"), ConfigError);
  CHECK_THROWS_AS(resolve_scheme("unobtainium"), ConfigError);
  CHECK_THROWS_AS(dg_kind_from_name("unobtainium"), ConfigError);
  CHECK_THROWS_AS(tree_kind_from_name("unobtainium"), ConfigError);
  CHECK_THROWS_AS(series_from_name("unobtainium"), ConfigError);
  CHECK_THROWS_AS(ref_kind_from_name("unobtainium"), ConfigError);
  CHECK_THROWS_AS(strategy_from_name("unobtainium"), ConfigError);
}

TEST_CASE("enum names round trip") {
  for (TreeKind k : {TreeKind::Mono, TreeKind::BiColored, TreeKind::Shaped})
    CHECK(tree_kind_from_name(tree_kind_name(k)) == k);
  for (RefKind k : {RefKind::GL4Fine, RefKind::SchemeFine})
    CHECK(ref_kind_from_name(ref_kind_name(k)) == k);
}

TEST_CASE("scheme resolution failure lists the catalog") {
  std::string msg;
  try {
    resolve_scheme("unobtainium");
  } catch (const ConfigError& e) {
    msg = e.what();
  }
  for (const std::string& n : builtin_scheme_names())
    CHECK(msg.find(n) != std::string::npos);
}

TEST_CASE("error hierarchy distinguishes user input from runtime trouble") {
  // configuration problems are invalid_argument, numerical ones runtime_error
  CHECK_THROWS_AS(resolve_scheme("unobtainium"), std::invalid_argument);
  ConfigError cfg("x");
  NumericalError num("y");
  DomainError dom("z");
  CHECK(dynamic_cast<std::invalid_argument*>(&cfg) != nullptr);
  CHECK(dynamic_cast<std::runtime_error*>(&num) != nullptr);
  CHECK(dynamic_cast<NumericalError*>(&dom) != nullptr);
}

TEST_CASE("catalogs are nonempty and duplicate-free") {
  auto unique_sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  std::vector<std::string> probs = builtin_problem_names();
  std::vector<std::string> schemes = builtin_scheme_names();
  std::vector<std::string> dgs = dg_kind_names();
  CHECK(probs.size() == 3);
  CHECK(schemes.size() == 15);
  CHECK(dgs.size() == 5);
  CHECK(unique_sorted(probs));
  CHECK(unique_sorted(schemes));
  CHECK(unique_sorted(dgs));
}
