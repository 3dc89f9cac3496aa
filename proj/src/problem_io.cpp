#include "dgflow/problem_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace dgflow {

using nlohmann::json;

static Polynomial parse_poly(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of monomials");
  Polynomial p(dim);
  for (const auto& t : j) {
    if (!t.contains("coef") || !t.contains("powers"))
      throw ConfigError(where + ": every monomial needs \"coef\" and \"powers\"");
    Monomial m;
    m.c = t.at("coef").get<double>();
    const auto& pw = t.at("powers");
    if (static_cast<int>(pw.size()) != dim)
      throw ConfigError(where + ": \"powers\" length must equal dim");
    for (int k = 0; k < dim; ++k) {
      int e = pw.at(k).get<int>();
      if (e < 0 || e > 255) throw ConfigError(where + ": exponent out of range");
      m.p[k] = static_cast<std::uint8_t>(e);
    }
    p.terms.push_back(m);
  }
  p.normalize();
  return p;
}

static bool poly_is_negation(Polynomial a, Polynomial b) {
  for (Monomial& m : b.terms) m.c = -m.c;
  a.normalize();
  b.normalize();
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].p != b.terms[i].p || a.terms[i].c != b.terms[i].c) return false;
  return true;
}

Problem load_problem_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("problem file " + path + " is not valid JSON: " + e.what());
  }

  if (!j.contains("dim") || !j.contains("H") || !j.contains("S") || !j.contains("x0"))
    throw ConfigError("problem file needs \"dim\", \"H\", \"S\" and \"x0\"");
  int dim = j.at("dim").get<int>();
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dim must be in [1, 16]");

  Polynomial H = parse_poly(j.at("H"), dim, "H");

  std::vector<std::pair<double, int>> logs;
  if (j.contains("log_terms")) {
    for (const auto& t : j.at("log_terms")) {
      double c = t.at("coef").get<double>();
      int idx = t.at("index").get<int>();
      if (idx < 0 || idx >= dim) throw ConfigError("log_terms: index out of range");
      logs.emplace_back(c, idx);
    }
  }

  SkewGradientSystem sys;
  sys.dim = dim;
  sys.name = j.value("name", std::filesystem::path(path).stem().string());
  sys.poly_H = H;
  sys.log_H = logs;
  sys.energy = [H, logs](const Vec& x) {
    double v = H.eval(x);
    for (auto [c, i] : logs) v += c * std::log(x[i]);
    return v;
  };
  sys.grad = [H, logs](const Vec& x) {
    Vec g = H.gradient(x);
    for (auto [c, i] : logs) g[i] += c / x[i];
    return g;
  };
  sys.hess = [H, logs](const Vec& x) {
    Mat h = H.hessian(x);
    for (auto [c, i] : logs) h(i, i) -= c / (x[i] * x[i]);
    return h;
  };
  if (!logs.empty()) {
    sys.domain = [logs](const Vec& x, std::string* why) {
      for (auto [c, i] : logs) {
        (void)c;
        if (x[i] <= 0.0) {
          if (why) *why = "coordinate " + std::to_string(i + 1) + " must stay positive (log term)";
          return false;
        }
      }
      return true;
    };
  }

  const json& S = j.at("S");
  if (S.is_string() && S.get<std::string>() == "canonical") {
    if (dim % 2 != 0) throw ConfigError("canonical S needs an even dimension");
    Mat m(dim, dim);
    int half = dim / 2;
    for (int i = 0; i < half; ++i) {
      m(i, half + i) = 1.0;
      m(half + i, i) = -1.0;
    }
    sys.skew = [m](const Vec&) { return m; };
    sys.constant_S = true;
  } else if (S.is_object() && S.contains("constant")) {
    const auto& rows = S.at("constant");
    if (static_cast<int>(rows.size()) != dim) throw ConfigError("S.constant must be dim x dim");
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(rows.at(i).size()) != dim) throw ConfigError("S.constant must be dim x dim");
      for (int k = 0; k < dim; ++k) m(i, k) = rows.at(i).at(k).get<double>();
    }
    if (asym_defect(m) != 0.0) throw ConfigError("S.constant is not antisymmetric");
    sys.skew = [m](const Vec&) { return m; };
    sys.constant_S = true;
  } else if (S.is_object() && S.contains("polynomial")) {
    const auto& rows = S.at("polynomial");
    if (static_cast<int>(rows.size()) != dim) throw ConfigError("S.polynomial must be dim x dim");
    std::vector<std::vector<Polynomial>> ent(dim, std::vector<Polynomial>(dim));
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(rows.at(i).size()) != dim) throw ConfigError("S.polynomial must be dim x dim");
      for (int k = 0; k < dim; ++k)
        ent[i][k] = parse_poly(rows.at(i).at(k), dim, "S[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    for (int i = 0; i < dim; ++i)
      for (int k = i; k < dim; ++k)
        if (!poly_is_negation(ent[i][k], ent[k][i]))
          throw ConfigError("S.polynomial is not antisymmetric (entries " + std::to_string(i) + "," + std::to_string(k) + ")");
    sys.skew = [ent, dim](const Vec& x) {
      Mat m(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) m(i, k) = ent[i][k].eval(x);
      // mirror to kill rounding asymmetry between p and -p evaluations
      for (int i = 0; i < dim; ++i) {
        m(i, i) = 0.0;
        for (int k = i + 1; k < dim; ++k) m(k, i) = -m(i, k);
      }
      return m;
    };
    sys.constant_S = false;
  } else {
    throw ConfigError("S must be \"canonical\", {\"constant\": ...} or {\"polynomial\": ...}");
  }

  const auto& x0j = j.at("x0");
  if (static_cast<int>(x0j.size()) != dim) throw ConfigError("x0 length must equal dim");
  Vec x0(dim);
  for (int i = 0; i < dim; ++i) x0[i] = x0j.at(i).get<double>();

  Problem p{sys.name, sys, x0};
  p.system.check_state(x0);
  return p;
}

Problem resolve_problem(const std::string& name_or_path) {
  for (const std::string& n : builtin_problem_names())
    if (n == name_or_path) return builtin_problem(n);
  if (name_or_path.size() > 5 && name_or_path.substr(name_or_path.size() - 5) == ".json")
    return load_problem_json(name_or_path);
  throw ConfigError("unknown problem '" + name_or_path + "' (not a built-in, not a .json path)");
}

} // namespace dgflow
