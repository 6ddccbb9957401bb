#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "segre/errors.hpp"
#include "segre/linalg.hpp"
#include "segre/manifold.hpp"
#include "segre/series.hpp"

namespace segre {

// Derivation sum_j a_j d/dx_j of C[[x]] with truncated coefficients.
struct FormalVectorField {
  std::size_t arity = 0;
  std::vector<TruncatedSeries> coeffs;
  int valid_order = 0;

  static FormalVectorField zero(std::size_t arity, int order) {
    return {arity, std::vector<TruncatedSeries>(arity, TruncatedSeries(arity, order)), order};
  }

  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const TruncatedSeries& s) { return s.is_zero(); });
  }

  std::vector<GaussianRational> value_at_origin() const {
    std::vector<GaussianRational> v;
    v.reserve(arity);
    for (const auto& c : coeffs) v.push_back(c.constant_term());
    return v;
  }

  friend bool operator==(const FormalVectorField& a, const FormalVectorField& b) {
    return a.arity == b.arity && a.valid_order == b.valid_order && a.coeffs == b.coeffs;
  }
};

// X f = sum_j a_j df/dx_j.
inline TruncatedSeries apply(const FormalVectorField& X, const TruncatedSeries& f) {
  if (f.arity() != X.arity) throw StructuralError("vector field applied to a series of another arity");
  const int order = std::min(X.valid_order, f.kappa() - 1);
  TruncatedSeries out(X.arity, std::max(order, 0));
  for (std::size_t j = 0; j < X.arity; ++j) {
    if (X.coeffs[j].is_zero()) continue;
    TruncatedSeries dj = partial_derivative(f, j);
    if (dj.is_zero()) continue;
    out += X.coeffs[j].truncated(std::min(X.coeffs[j].kappa(), order)) * dj.truncated(std::min(dj.kappa(), order));
  }
  return out.truncated(std::min(out.kappa(), order));
}

// [X, Y] with coefficients X(b_j) - Y(a_j); one order of validity is lost.
inline FormalVectorField bracket(const FormalVectorField& X, const FormalVectorField& Y) {
  if (X.arity != Y.arity) throw StructuralError("bracket of fields on different spaces");
  const int order = std::min(X.valid_order, Y.valid_order) - 1;
  if (order < 0) throw PreconditionError("bracket exceeds the valid order of its arguments");
  FormalVectorField out{X.arity, {}, order};
  for (std::size_t j = 0; j < X.arity; ++j) {
    TruncatedSeries c = apply(X, Y.coeffs[j]) - apply(Y, X.coeffs[j]);
    out.coeffs.push_back(c.truncated(std::min(c.kappa(), order)));
  }
  return out;
}

// sigma(X) f := sigma(X(sigma(f))): swaps the Z and zeta slots and applies
// sigma to every coefficient.
inline FormalVectorField sigma_field(const FormalVectorField& X, BlockSplit split) {
  if (X.arity != 2 * split.N) throw StructuralError("sigma_field requires a field in 2N variables");
  FormalVectorField out{X.arity, std::vector<TruncatedSeries>(X.arity), X.valid_order};
  for (std::size_t j = 0; j < X.arity; ++j) {
    const std::size_t target = j < split.N ? j + split.N : j - split.N;
    out.coeffs[target] = sigma(X.coeffs[j], split);
  }
  return out;
}

struct CrBasis {
  std::vector<FormalVectorField> L;        // (0,1): d/dchi_j + Qbar_chi_j d/dtau
  std::vector<FormalVectorField> L_tilde;  // (1,0): d/dz_j + Q_z_j d/dw
};

inline CrBasis cr_basis(const GenericManifold& m) {
  const AmbientLayout& Lay = m.layout;
  const int order = m.graph.valid_order - 1;
  CrBasis b;
  for (std::size_t j = 0; j < Lay.n(); ++j) {
    FormalVectorField L = FormalVectorField::zero(Lay.arity(), order);
    FormalVectorField Lt = FormalVectorField::zero(Lay.arity(), order);
    L.coeffs[Lay.chi(j)] = TruncatedSeries::constant(Lay.arity(), order, 1);
    Lt.coeffs[Lay.z(j)] = TruncatedSeries::constant(Lay.arity(), order, 1);
    for (std::size_t l = 0; l < Lay.d; ++l) {
      L.coeffs[Lay.tau(l)] = partial_derivative(m.graph.Qbar[l], Lay.chi(j)).truncated(order);
      Lt.coeffs[Lay.w(l)] = partial_derivative(m.graph.Q[l], Lay.z(j)).truncated(order);
    }
    b.L.push_back(std::move(L));
    b.L_tilde.push_back(std::move(Lt));
  }
  return b;
}

struct BracketWitness {
  std::string word;
  std::vector<GaussianRational> value;  // evaluation at the origin
};

struct LieHullReport {
  std::size_t dim_g0 = 0;
  int bracket_depth_used = 0;
  std::vector<BracketWitness> basis_witnesses;
  bool stable = false;
  bool depth_truncated = false;  // requested depth exceeded what the truncation order supports
  std::size_t cap = 0;           // 2N - d
};

namespace detail {

using FieldKey = std::pair<std::size_t, ExponentVector>;

struct FieldKeyLess {
  bool operator()(const FieldKey& a, const FieldKey& b) const {
    if (a.first != b.first) return a.first < b.first;
    return graded_lex_less(a.second, b.second);
  }
};

using SparseRow = std::map<FieldKey, GaussianRational, FieldKeyLess>;

inline SparseRow flatten(const FormalVectorField& X, int order) {
  SparseRow row;
  for (std::size_t j = 0; j < X.arity; ++j) {
    for (const auto& t : X.coeffs[j].terms()) {
      if (static_cast<int>(t.exponent.total_degree()) > order) break;
      row.emplace(FieldKey{j, t.exponent}, t.coeff);
    }
  }
  return row;
}

// Incremental echelon basis of sparse rows, keyed by leading entry.
class SparseEchelon {
 public:
  // Returns true and stores the row if it is independent of the rows so far.
  bool insert(SparseRow row) {
    while (!row.empty()) {
      auto lead = row.begin();
      auto it = rows_.find(lead->first);
      if (it == rows_.end()) {
        const GaussianRational inv = lead->second.inverse();
        for (auto& [k, v] : row) v *= inv;
        const FieldKey key = row.begin()->first;
        rows_.emplace(key, std::move(row));
        return true;
      }
      const GaussianRational factor = lead->second;
      for (const auto& [k, v] : it->second) {
        auto [pos, inserted] = row.try_emplace(k);
        pos->second -= factor * v;
        if (pos->second.is_zero()) row.erase(pos);
      }
    }
    return false;
  }

 private:
  std::map<FieldKey, SparseRow, FieldKeyLess> rows_;
};

}  // namespace detail

// Breadth-first closure over left-normed bracket words of the CR basis.
// Words whose fields are linear combinations (modulo truncation) of fields
// already found are not bracketed further; their brackets are combinations
// of brackets already explored.
inline LieHullReport lie_hull_dimension(const GenericManifold& m, int max_depth) {
  if (max_depth < 1) throw PreconditionError("lie_hull_dimension: max_depth must be >= 1");
  const AmbientLayout& Lay = m.layout;
  LieHullReport report;
  report.cap = 2 * Lay.N - Lay.d;
  const int supported = m.graph.valid_order;
  if (max_depth > supported) {
    report.depth_truncated = true;
    max_depth = supported;
  }

  const CrBasis basis = cr_basis(m);
  std::vector<std::pair<std::string, FormalVectorField>> generators;
  for (std::size_t j = 0; j < Lay.n(); ++j) generators.emplace_back("L" + std::to_string(j + 1), basis.L[j]);
  for (std::size_t j = 0; j < Lay.n(); ++j) generators.emplace_back("Lt" + std::to_string(j + 1), basis.L_tilde[j]);

  std::vector<std::pair<std::string, FormalVectorField>> kept;
  std::vector<std::vector<GaussianRational>> eval_rows;
  std::size_t dim = 0;

  auto record_value = [&](const std::string& word, const FormalVectorField& X) {
    std::vector<GaussianRational> v = X.value_at_origin();
    std::vector<std::vector<GaussianRational>> trial = eval_rows;
    trial.push_back(v);
    QiMatrix mat(trial.size(), Lay.arity());
    for (std::size_t r = 0; r < trial.size(); ++r) {
      for (std::size_t c = 0; c < Lay.arity(); ++c) mat(r, c) = trial[r][c];
    }
    if (rank(mat) > dim) {
      eval_rows = std::move(trial);
      ++dim;
      report.basis_witnesses.push_back({word, std::move(v)});
    }
  };

  std::vector<std::pair<std::string, FormalVectorField>> frontier;
  {
    detail::SparseEchelon ech;
    for (const auto& g : generators) {
      if (ech.insert(detail::flatten(g.second, g.second.valid_order))) {
        frontier.push_back(g);
        kept.push_back(g);
        record_value(g.first, g.second);
      }
    }
  }
  report.bracket_depth_used = 1;
  bool grew_last = true;

  for (int depth = 2; depth <= max_depth && dim < report.cap; ++depth) {
    const int order = supported - depth;
    detail::SparseEchelon ech;
    for (const auto& k : kept) ech.insert(detail::flatten(k.second, order));
    std::vector<std::pair<std::string, FormalVectorField>> next;
    const std::size_t before = dim;
    for (const auto& g : generators) {
      for (const auto& w : frontier) {
        FormalVectorField X = bracket(g.second, w.second);
        if (X.is_zero()) continue;
        if (!ech.insert(detail::flatten(X, order))) continue;
        std::string word = "[" + g.first + "," + w.first + "]";
        record_value(word, X);
        next.emplace_back(std::move(word), std::move(X));
      }
    }
    report.bracket_depth_used = depth;
    grew_last = dim > before;
    if (next.empty()) {
      grew_last = false;
      break;
    }
    kept.insert(kept.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  report.dim_g0 = dim;
  report.stable = dim == report.cap || !grew_last;
  return report;
}

}  // namespace segre
