#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "segre/errors.hpp"
#include "segre/expression.hpp"
#include "segre/implicit.hpp"
#include "segre/linalg.hpp"
#include "segre/manifold.hpp"

namespace segre {

// {"N":int, "d":int, "form":"graph"|"rho", "expressions":[...], "split":[...]?}
inline ManifoldSpec parse_manifold_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(LoadError::Kind::format, std::string("manifold file is not valid JSON: ") + e.what());
  }
  ManifoldSpec spec;
  try {
    spec.N = j.at("N").get<int>();
    spec.d = j.at("d").get<int>();
    const std::string form = j.at("form").get<std::string>();
    if (form == "graph") {
      spec.form = ManifoldSpec::Form::graph;
    } else if (form == "rho") {
      spec.form = ManifoldSpec::Form::rho;
    } else {
      throw LoadError(LoadError::Kind::format, "form must be \"graph\" or \"rho\"");
    }
    spec.expressions = j.at("expressions").get<std::vector<std::string>>();
    if (j.contains("split") && !j.at("split").is_null()) spec.split = j.at("split").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(LoadError::Kind::format, std::string("malformed manifold file: ") + e.what());
  }
  return spec;
}

inline std::string manifold_json(const ManifoldSpec& spec) {
  nlohmann::json j;
  j["N"] = spec.N;
  j["d"] = spec.d;
  j["form"] = spec.form == ManifoldSpec::Form::graph ? "graph" : "rho";
  j["expressions"] = spec.expressions;
  if (spec.split) j["split"] = *spec.split;
  return j.dump();
}

inline ManifoldSpec read_manifold_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Kind::format, "cannot open manifold file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifold_json(ss.str());
}

namespace detail {

inline void require_valid_spec(const ManifoldSpec& spec) {
  if (spec.d < 1 || spec.N <= spec.d) {
    throw LoadError(LoadError::Kind::degenerate, "need N > d >= 1 (got N=" + std::to_string(spec.N) +
                                                     ", d=" + std::to_string(spec.d) + ")");
  }
  if (2 * spec.N > static_cast<int>(kMaxVariables)) throw LoadError(LoadError::Kind::format, "N too large");
  if (spec.expressions.size() != static_cast<std::size_t>(spec.d)) {
    throw LoadError(LoadError::Kind::format, "expected exactly d expressions");
  }
}

inline TruncatedSeries parse_checked(const std::string& text, const VariableTable& vars, int kappa, std::size_t which) {
  try {
    return parse_expression(text, vars, kappa);
  } catch (const ParseError& e) {
    throw ParseError("expression " + std::to_string(which + 1) + ": " + e.message(), e.position());
  }
}

inline void verify_loaded(const GenericManifold& m) {
  const AmbientLayout& L = m.layout;
  const RealityCheck reality = check_reality(m.graph, L);
  if (!reality.holds) {
    throw LoadError(LoadError::Kind::reality, "reality identity Q(z,chi,Qbar(chi,z,w)) = w fails; " + reality.witness_text);
  }
  for (std::size_t l = 0; l < L.d; ++l) {
    if (!ideal_member(m.rho[l], m)) {
      throw InternalConsistencyError("defining function " + std::to_string(l + 1) + " is not in the graph ideal");
    }
    if (!ideal_member(sigma(m.rho[l], L.split()), m)) {
      throw LoadError(LoadError::Kind::reality, "sigma(rho_" + std::to_string(l + 1) + ") is not in the manifold ideal");
    }
  }
}

inline GenericManifold load_graph(const ManifoldSpec& spec, int kappa) {
  GenericManifold m;
  m.spec = spec;
  m.kappa = kappa;
  m.layout = {static_cast<std::size_t>(spec.N), static_cast<std::size_t>(spec.d)};
  const AmbientLayout& L = m.layout;
  if (spec.split) {
    std::vector<int> expected;
    for (int k = 0; k < spec.d; ++k) expected.push_back(static_cast<int>(L.n()) + k + 1);
    if (*spec.split != expected) {
      throw LoadError(LoadError::Kind::split, "graph form fixes the w-coordinates as the last d; split is inconsistent");
    }
  }
  const VariableTable vars = L.graph_names();
  std::vector<TruncatedSeries> q;
  std::vector<TruncatedSeries> rho;
  for (std::size_t l = 0; l < L.d; ++l) {
    TruncatedSeries s = parse_checked(spec.expressions[l], vars, kappa, l);
    for (const auto& t : s.terms()) {
      for (std::size_t k = 0; k < L.d; ++k) {
        if (t.exponent[L.w(k)] != 0) {
          throw LoadError(LoadError::Kind::format, "graph expression " + std::to_string(l + 1) + " depends on w");
        }
      }
    }
    if (!s.constant_term().is_zero()) {
      throw LoadError(LoadError::Kind::format, "graph expression " + std::to_string(l + 1) + " has a constant term");
    }
    rho.push_back(TruncatedSeries::variable(L.arity(), kappa, L.w(l)) - s);
    q.push_back(std::move(s));
  }
  m.graph = graph_from_Q(FormalMap(L.arity(), std::move(q)), L);
  m.rho = FormalMap(L.arity(), std::move(rho));
  for (std::size_t k = 0; k < L.N; ++k) m.coordinate_order.push_back(k);
  return m;
}

inline GenericManifold load_rho(const ManifoldSpec& spec, int kappa) {
  GenericManifold m;
  m.spec = spec;
  m.kappa = kappa;
  m.layout = {static_cast<std::size_t>(spec.N), static_cast<std::size_t>(spec.d)};
  const AmbientLayout& L = m.layout;
  const VariableTable vars = L.rho_names();
  std::vector<TruncatedSeries> raw;
  for (std::size_t l = 0; l < L.d; ++l) {
    raw.push_back(parse_checked(spec.expressions[l], vars, kappa, l));
    if (!raw.back().constant_term().is_zero()) {
      throw LoadError(LoadError::Kind::format, "defining function " + std::to_string(l + 1) + " does not vanish at 0");
    }
  }
  QiMatrix dZ(L.d, L.N);
  for (std::size_t l = 0; l < L.d; ++l) {
    for (std::size_t k = 0; k < L.N; ++k) dZ(l, k) = raw[l].coefficient(ExponentVector::unit(L.arity(), k));
  }
  if (rank(dZ) < L.d) {
    throw LoadError(LoadError::Kind::genericity, "d rho / dZ (0) has rank < d; the manifold is not generic at 0");
  }

  std::vector<std::size_t> w_cols;
  if (spec.split) {
    std::set<int> seen;
    for (int k : *spec.split) {
      if (k < 1 || k > spec.N || !seen.insert(k).second) {
        throw LoadError(LoadError::Kind::split, "split entries must be distinct indices in 1..N");
      }
      w_cols.push_back(static_cast<std::size_t>(k - 1));
    }
    if (w_cols.size() != L.d) throw LoadError(LoadError::Kind::split, "split must list exactly d coordinates");
    std::vector<std::size_t> rows = first_combination(L.d);
    if (rank(select(dZ, rows, w_cols)) < L.d) {
      throw LoadError(LoadError::Kind::split, "declared split does not give an invertible d rho / dw (0)");
    }
  } else {
    std::vector<std::size_t> rows = first_combination(L.d);
    std::vector<std::size_t> comb = first_combination(L.d);
    do {
      if (rank(select(dZ, rows, comb)) == L.d) {
        w_cols = comb;
        break;
      }
    } while (next_combination(comb, L.N));
  }

  std::vector<bool> is_w(L.N, false);
  for (std::size_t c : w_cols) is_w[c] = true;
  for (std::size_t k = 0; k < L.N; ++k) {
    if (!is_w[k]) m.coordinate_order.push_back(k);
  }
  m.coordinate_order.insert(m.coordinate_order.end(), w_cols.begin(), w_cols.end());

  std::vector<std::optional<std::size_t>> mapping(L.arity());
  for (std::size_t pos = 0; pos < L.N; ++pos) {
    mapping[m.coordinate_order[pos]] = pos;
    mapping[L.N + m.coordinate_order[pos]] = L.N + pos;
  }
  std::vector<TruncatedSeries> rho;
  for (const auto& r : raw) rho.push_back(relabel(r, L.arity(), mapping));
  m.rho = FormalMap(L.arity(), std::move(rho));
  m.graph = solve_graph(m.rho, L, kappa);
  return m;
}

}  // namespace detail

// Parses and validates a manifold at truncation order kappa. Graph-form
// input yields rho_j = w_j - Q_j; rho-form input is renumbered by the split
// and solved for its graph.
inline GenericManifold load_manifold(const ManifoldSpec& spec, int kappa) {
  if (kappa < 2) throw PreconditionError("truncation order must be at least 2");
  detail::require_valid_spec(spec);
  GenericManifold m = spec.form == ManifoldSpec::Form::graph ? detail::load_graph(spec, kappa)
                                                             : detail::load_rho(spec, kappa);
  detail::verify_loaded(m);
  return m;
}

// Same manifold at a different truncation order.
inline GenericManifold reload(const GenericManifold& m, int kappa) { return load_manifold(m.spec, kappa); }

// Desk-scale fixtures shipped with the engine.
inline const std::map<std::string, ManifoldSpec>& builtin_fixtures() {
  static const std::map<std::string, ManifoldSpec> fixtures = {
      {"h", {2, 1, ManifoldSpec::Form::graph, {"ta1 + 2*i*z1*ch1"}, std::nullopt}},
      {"flat", {2, 1, ManifoldSpec::Form::graph, {"ta1"}, std::nullopt}},
      {"l4", {2, 1, ManifoldSpec::Form::graph, {"ta1 + 2*i*z1^2*ch1^2"}, std::nullopt}},
      {"c2", {3, 2, ManifoldSpec::Form::graph, {"ta1 + 2*i*z1*ch1", "ta2 + 2*i*z1^2*ch1^2"}, std::nullopt}},
  };
  return fixtures;
}

inline const ManifoldSpec& fixture(const std::string& name) {
  const auto& all = builtin_fixtures();
  auto it = all.find(name);
  if (it == all.end()) throw LoadError(LoadError::Kind::format, "unknown fixture '" + name + "'");
  return it->second;
}

}  // namespace segre
