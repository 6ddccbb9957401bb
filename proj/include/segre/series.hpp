#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segre/errors.hpp"
#include "segre/gaussian_rational.hpp"

namespace segre {

inline constexpr std::size_t kMaxVariables = 32;

// Monomial exponent over a fixed number of variables. Entries are bounded
// by 255, far beyond any truncation order the engine works with.
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(std::size_t arity) : arity_(checked_arity(arity)) {}
  ExponentVector(std::initializer_list<unsigned> entries) : arity_(checked_arity(entries.size())) {
    std::size_t i = 0;
    for (unsigned e : entries) set(i++, e);
  }

  std::size_t arity() const noexcept { return arity_; }
  unsigned total_degree() const noexcept { return degree_; }
  unsigned operator[](std::size_t i) const noexcept { return e_[i]; }

  void set(std::size_t i, unsigned value) {
    if (i >= arity_) throw StructuralError("exponent index out of range");
    if (value > 255) throw StructuralError("exponent exceeds 255");
    degree_ = static_cast<std::uint16_t>(degree_ - e_[i] + value);
    e_[i] = static_cast<std::uint8_t>(value);
  }

  ExponentVector& operator+=(const ExponentVector& o) {
    for (std::size_t i = 0; i < arity_; ++i) set(i, e_[i] + o.e_[i]);
    return *this;
  }
  friend ExponentVector operator+(ExponentVector a, const ExponentVector& b) { return a += b; }

  friend bool operator==(const ExponentVector& a, const ExponentVector& b) noexcept {
    return a.arity_ == b.arity_ && a.e_ == b.e_;
  }

  // Graded-lexicographic: lower total degree first, then larger leading
  // exponents first (x1^2 < x1*x2 < x2^2).
  friend bool graded_lex_less(const ExponentVector& a, const ExponentVector& b) noexcept {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    for (std::size_t i = 0; i < a.arity_; ++i) {
      if (a.e_[i] != b.e_[i]) return a.e_[i] > b.e_[i];
    }
    return false;
  }

  std::size_t hash() const noexcept {
    return std::hash<std::string_view>{}(
        std::string_view(reinterpret_cast<const char*>(e_.data()), arity_));
  }

  static ExponentVector unit(std::size_t arity, std::size_t index, unsigned power = 1) {
    ExponentVector e(arity);
    e.set(index, power);
    return e;
  }

 private:
  static std::uint8_t checked_arity(std::size_t arity) {
    if (arity > kMaxVariables) throw StructuralError("variable count exceeds engine cap");
    return static_cast<std::uint8_t>(arity);
  }

  std::array<std::uint8_t, kMaxVariables> e_{};
  std::uint8_t arity_ = 0;
  std::uint16_t degree_ = 0;
};

struct ExponentHash {
  std::size_t operator()(const ExponentVector& e) const noexcept { return e.hash(); }
};

struct Term {
  ExponentVector exponent;
  GaussianRational coeff;
};

// Element of C[[x_1..x_arity]] known modulo terms of total degree > kappa.
// Terms are kept sorted in graded-lex order with no zero coefficients.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(std::size_t arity, int kappa) : arity_(arity), kappa_(kappa) {
    if (kappa < 0) throw PreconditionError("truncation order must be non-negative");
    if (arity > kMaxVariables) throw StructuralError("variable count exceeds engine cap");
  }

  static TruncatedSeries constant(std::size_t arity, int kappa, const GaussianRational& c) {
    TruncatedSeries s(arity, kappa);
    if (!c.is_zero()) s.terms_.push_back({ExponentVector(arity), c});
    return s;
  }

  static TruncatedSeries variable(std::size_t arity, int kappa, std::size_t index,
                                  const GaussianRational& c = 1) {
    if (index >= arity) throw StructuralError("variable index out of range");
    TruncatedSeries s(arity, kappa);
    if (kappa >= 1 && !c.is_zero()) s.terms_.push_back({ExponentVector::unit(arity, index), c});
    return s;
  }

  // Builds a series from arbitrary terms: duplicates are merged, zeros and
  // terms above kappa dropped.
  static TruncatedSeries from_terms(std::size_t arity, int kappa, std::vector<Term> terms) {
    TruncatedSeries s(arity, kappa);
    std::unordered_map<ExponentVector, GaussianRational, ExponentHash> acc;
    for (auto& t : terms) {
      if (t.exponent.arity() != arity) throw StructuralError("term arity mismatch");
      if (static_cast<int>(t.exponent.total_degree()) > kappa) continue;
      acc[t.exponent] += t.coeff;
    }
    s.adopt(std::move(acc));
    return s;
  }

  std::size_t arity() const noexcept { return arity_; }
  int kappa() const noexcept { return kappa_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  GaussianRational coefficient(const ExponentVector& e) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                               [](const Term& t, const ExponentVector& x) {
                                 return graded_lex_less(t.exponent, x);
                               });
    if (it != terms_.end() && it->exponent == e) return it->coeff;
    return {};
  }

  GaussianRational constant_term() const {
    if (!terms_.empty() && terms_.front().exponent.total_degree() == 0) return terms_.front().coeff;
    return {};
  }

  // Lowest degree present; kappa + 1 for the zero series.
  int order() const noexcept {
    return terms_.empty() ? kappa_ + 1 : static_cast<int>(terms_.front().exponent.total_degree());
  }

  int degree() const noexcept {
    return terms_.empty() ? -1 : static_cast<int>(terms_.back().exponent.total_degree());
  }

  TruncatedSeries truncated(int kappa) const {
    if (kappa > kappa_) throw PreconditionError("cannot raise truncation order of a series");
    TruncatedSeries s(arity_, kappa);
    for (const auto& t : terms_) {
      if (static_cast<int>(t.exponent.total_degree()) > kappa) break;
      s.terms_.push_back(t);
    }
    return s;
  }

  // Same truncation order, terms of degree > k removed.
  TruncatedSeries lower_part(int k) const {
    TruncatedSeries s(arity_, kappa_);
    for (const auto& t : terms_) {
      if (static_cast<int>(t.exponent.total_degree()) > k) break;
      s.terms_.push_back(t);
    }
    return s;
  }

  // Component of exact total degree k.
  TruncatedSeries homogeneous_part(int k) const {
    TruncatedSeries s(arity_, kappa_);
    for (const auto& t : terms_) {
      if (static_cast<int>(t.exponent.total_degree()) == k) s.terms_.push_back(t);
    }
    return s;
  }

  TruncatedSeries conj() const {
    TruncatedSeries s = *this;
    for (auto& t : s.terms_) t.coeff = t.coeff.conj();
    return s;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries s = *this;
    for (auto& t : s.terms_) t.coeff = -t.coeff;
    return s;
  }

  TruncatedSeries& operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.coeff *= c;
    return *this;
  }

  friend TruncatedSeries operator*(TruncatedSeries a, const GaussianRational& c) { return a *= c; }
  friend TruncatedSeries operator*(const GaussianRational& c, TruncatedSeries a) { return a *= c; }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, false);
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, true);
  }
  TruncatedSeries& operator+=(const TruncatedSeries& b) { return *this = *this + b; }
  TruncatedSeries& operator-=(const TruncatedSeries& b) { return *this = *this - b; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_arity(a, b);
    const int kappa = std::min(a.kappa_, b.kappa_);
    std::unordered_map<ExponentVector, GaussianRational, ExponentHash> acc;
    for (const auto& ta : a.terms_) {
      const int da = static_cast<int>(ta.exponent.total_degree());
      if (da > kappa) break;
      for (const auto& tb : b.terms_) {
        if (da + static_cast<int>(tb.exponent.total_degree()) > kappa) break;
        acc[ta.exponent + tb.exponent].add_product(ta.coeff, tb.coeff);
      }
    }
    TruncatedSeries s(a.arity_, kappa);
    s.adopt(std::move(acc));
    return s;
  }
  TruncatedSeries& operator*=(const TruncatedSeries& b) { return *this = *this * b; }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.arity_ != b.arity_ || a.kappa_ != b.kappa_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (!(a.terms_[i].exponent == b.terms_[i].exponent) || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    }
    return true;
  }
  friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) { return !(a == b); }

  // Equality of the known parts at the common truncation order.
  friend bool agree(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_arity(a, b);
    const int k = std::min(a.kappa_, b.kappa_);
    return a.truncated(k) == b.truncated(k);
  }

 private:
  static void require_same_arity(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.arity_ != b.arity_) {
      throw StructuralError("series arity mismatch: " + std::to_string(a.arity_) + " vs " +
                            std::to_string(b.arity_));
    }
  }

  static TruncatedSeries combine(const TruncatedSeries& a, const TruncatedSeries& b, bool subtract) {
    require_same_arity(a, b);
    const int kappa = std::min(a.kappa_, b.kappa_);
    TruncatedSeries s(a.arity_, kappa);
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    auto in_range = [kappa](const Term& t) { return static_cast<int>(t.exponent.total_degree()) <= kappa; };
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
      if (ib == b.terms_.end() || (ia != a.terms_.end() && graded_lex_less(ia->exponent, ib->exponent))) {
        if (!in_range(*ia)) break;
        s.terms_.push_back(*ia++);
      } else if (ia == a.terms_.end() || graded_lex_less(ib->exponent, ia->exponent)) {
        if (!in_range(*ib)) break;
        s.terms_.push_back({ib->exponent, subtract ? -ib->coeff : ib->coeff});
        ++ib;
      } else {
        if (!in_range(*ia)) break;
        GaussianRational c = subtract ? ia->coeff - ib->coeff : ia->coeff + ib->coeff;
        if (!c.is_zero()) s.terms_.push_back({ia->exponent, std::move(c)});
        ++ia;
        ++ib;
      }
    }
    return s;
  }

  void adopt(std::unordered_map<ExponentVector, GaussianRational, ExponentHash>&& acc) {
    terms_.clear();
    terms_.reserve(acc.size());
    for (auto& [e, c] : acc) {
      if (!c.is_zero()) terms_.push_back({e, std::move(c)});
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return graded_lex_less(x.exponent, y.exponent); });
  }

  friend TruncatedSeries partial_derivative(const TruncatedSeries& f, std::size_t j);
  friend TruncatedSeries relabel(const TruncatedSeries& f, std::size_t new_arity,
                                 std::span<const std::optional<std::size_t>> mapping);

  std::size_t arity_ = 0;
  int kappa_ = 0;
  std::vector<Term> terms_;
};

inline TruncatedSeries partial_derivative(const TruncatedSeries& f, std::size_t j) {
  if (j >= f.arity()) throw StructuralError("derivative index out of range");
  if (f.kappa() == 0) throw PreconditionError("cannot differentiate a series known only to order 0");
  TruncatedSeries d(f.arity(), f.kappa() - 1);
  for (const auto& t : f.terms()) {
    const unsigned e = t.exponent[j];
    if (e == 0 || static_cast<int>(t.exponent.total_degree()) > f.kappa()) continue;
    ExponentVector x = t.exponent;
    x.set(j, e - 1);
    d.terms_.push_back({x, t.coeff * GaussianRational(static_cast<long>(e))});
  }
  // Lowering one entry by one preserves graded-lex order among the survivors.
  std::sort(d.terms_.begin(), d.terms_.end(),
            [](const Term& a, const Term& b) { return graded_lex_less(a.exponent, b.exponent); });
  return d;
}

// Substitutes variable i by variable mapping[i] of a new ring (or by zero
// when mapping[i] is empty). Several variables may map to the same target.
inline TruncatedSeries relabel(const TruncatedSeries& f, std::size_t new_arity,
                               std::span<const std::optional<std::size_t>> mapping) {
  if (mapping.size() != f.arity()) throw StructuralError("relabel mapping size mismatch");
  for (const auto& m : mapping) {
    if (m && *m >= new_arity) throw StructuralError("relabel target out of range");
  }
  std::vector<Term> out;
  out.reserve(f.size());
  for (const auto& t : f.terms()) {
    ExponentVector x(new_arity);
    bool killed = false;
    for (std::size_t i = 0; i < f.arity() && !killed; ++i) {
      if (t.exponent[i] == 0) continue;
      if (!mapping[i]) {
        killed = true;
      } else {
        x.set(*mapping[i], x[*mapping[i]] + t.exponent[i]);
      }
    }
    if (!killed) out.push_back({x, t.coeff});
  }
  return TruncatedSeries::from_terms(new_arity, f.kappa(), std::move(out));
}

inline TruncatedSeries relabel(const TruncatedSeries& f, std::size_t new_arity,
                               const std::vector<std::optional<std::size_t>>& mapping) {
  return relabel(f, new_arity, std::span<const std::optional<std::size_t>>(mapping));
}

// Embeds f into a ring with more variables: variable i becomes offset + i.
inline TruncatedSeries embed(const TruncatedSeries& f, std::size_t new_arity, std::size_t offset = 0) {
  std::vector<std::optional<std::size_t>> m(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) m[i] = offset + i;
  return relabel(f, new_arity, m);
}

// Coordinate split of C^N x C^N into a Z-block and a zeta-block.
struct BlockSplit {
  std::size_t N = 0;
};

// sigma(f)(Z, zeta) = conj(f)(zeta, Z).
inline TruncatedSeries sigma(const TruncatedSeries& f, BlockSplit split) {
  if (split.N == 0 || f.arity() != 2 * split.N) {
    throw StructuralError("sigma requires a series in 2N variables with a declared block split");
  }
  std::vector<std::optional<std::size_t>> m(f.arity());
  for (std::size_t i = 0; i < split.N; ++i) {
    m[i] = split.N + i;
    m[split.N + i] = i;
  }
  return relabel(f, f.arity(), m).conj();
}

inline GaussianRational evaluate(const TruncatedSeries& f, std::span<const GaussianRational> point) {
  if (point.size() != f.arity()) throw StructuralError("evaluation point length mismatch");
  std::vector<std::vector<GaussianRational>> powers(f.arity(), std::vector<GaussianRational>{1});
  GaussianRational sum;
  for (const auto& t : f.terms()) {
    GaussianRational term = t.coeff;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      const unsigned e = t.exponent[i];
      if (e == 0) continue;
      auto& p = powers[i];
      while (p.size() <= e) p.push_back(p.back() * point[i]);
      term *= p[e];
    }
    sum += term;
  }
  return sum;
}

inline GaussianRational evaluate(const TruncatedSeries& f, const std::vector<GaussianRational>& point) {
  return evaluate(f, std::span<const GaussianRational>(point));
}

// p-tuple of series in a common set of source variables.
class FormalMap {
 public:
  FormalMap() = default;
  FormalMap(std::size_t source_arity, std::vector<TruncatedSeries> components, bool vanishes_at_origin = true)
      : source_arity_(source_arity), components_(std::move(components)), vanishes_at_origin_(vanishes_at_origin) {
    for (const auto& c : components_) {
      if (c.arity() != source_arity_) throw StructuralError("map component arity mismatch");
      if (vanishes_at_origin_ && !c.constant_term().is_zero()) {
        throw PreconditionError("map declared to vanish at the origin has a nonzero constant term");
      }
    }
  }

  static FormalMap identity(std::size_t arity, int kappa) {
    std::vector<TruncatedSeries> c;
    c.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) c.push_back(TruncatedSeries::variable(arity, kappa, i));
    return {arity, std::move(c)};
  }

  std::size_t source_arity() const noexcept { return source_arity_; }
  std::size_t target_arity() const noexcept { return components_.size(); }
  bool vanishes_at_origin() const noexcept { return vanishes_at_origin_; }
  const std::vector<TruncatedSeries>& components() const noexcept { return components_; }
  const TruncatedSeries& operator[](std::size_t i) const { return components_.at(i); }

  int kappa() const {
    int k = std::numeric_limits<int>::max();
    for (const auto& c : components_) k = std::min(k, c.kappa());
    return k;
  }

  // Coefficientwise conjugation, no variable swap.
  FormalMap conj() const {
    std::vector<TruncatedSeries> c;
    c.reserve(components_.size());
    for (const auto& s : components_) c.push_back(s.conj());
    return {source_arity_, std::move(c), vanishes_at_origin_};
  }

  FormalMap truncated(int kappa) const {
    std::vector<TruncatedSeries> c;
    for (const auto& s : components_) c.push_back(s.truncated(std::min(kappa, s.kappa())));
    return {source_arity_, std::move(c), vanishes_at_origin_};
  }

  friend bool operator==(const FormalMap& a, const FormalMap& b) {
    return a.source_arity_ == b.source_arity_ && a.components_ == b.components_;
  }

 private:
  std::size_t source_arity_ = 0;
  std::vector<TruncatedSeries> components_;
  bool vanishes_at_origin_ = true;
};

// Concatenates the components of several maps with a common source.
inline FormalMap concat(std::initializer_list<const FormalMap*> parts) {
  std::vector<TruncatedSeries> c;
  std::size_t arity = 0;
  bool first = true;
  for (const FormalMap* m : parts) {
    if (first) {
      arity = m->source_arity();
      first = false;
    } else if (m->source_arity() != arity) {
      throw StructuralError("concatenated maps differ in source arity");
    }
    c.insert(c.end(), m->components().begin(), m->components().end());
  }
  return {arity, std::move(c)};
}

namespace detail {

class Substitution {
 public:
  Substitution(const FormalMap& g, int kappa) : g_(g), kappa_(kappa), powers_(g.target_arity()) {
    for (std::size_t i = 0; i < g.target_arity(); ++i) {
      orders_.push_back(g[i].truncated(std::min(kappa, g[i].kappa())).order());
    }
  }

  TruncatedSeries run(const TruncatedSeries& f) {
    std::vector<const Term*> live;
    for (const auto& t : f.terms()) {
      long bound = 0;
      for (std::size_t i = 0; i < f.arity(); ++i) {
        if (t.exponent[i] != 0) bound += static_cast<long>(t.exponent[i]) * orders_[i];
      }
      if (bound <= kappa_) live.push_back(&t);
    }
    return horner(live, 0);
  }

 private:
  const TruncatedSeries& power(std::size_t var, unsigned k) {
    auto& p = powers_[var];
    if (p.empty()) p.push_back(TruncatedSeries::constant(g_.source_arity(), kappa_, 1));
    while (p.size() <= k) p.push_back(p.back() * g_[var].truncated(std::min(kappa_, g_[var].kappa())));
    return p[k];
  }

  // Groups terms by the exponent of `var` and recurses on the remaining
  // variables; each group is multiplied once by the cached power.
  TruncatedSeries horner(const std::vector<const Term*>& terms, std::size_t var) {
    const std::size_t m = g_.target_arity();
    if (var == m) {
      GaussianRational c;
      for (const Term* t : terms) c += t->coeff;
      return TruncatedSeries::constant(g_.source_arity(), kappa_, c);
    }
    std::map<unsigned, std::vector<const Term*>> groups;
    for (const Term* t : terms) groups[t->exponent[var]].push_back(t);
    TruncatedSeries sum(g_.source_arity(), kappa_);
    for (const auto& [k, group] : groups) {
      TruncatedSeries inner = horner(group, var + 1);
      if (inner.is_zero()) continue;
      sum += k == 0 ? inner : inner * power(var, k);
    }
    return sum;
  }

  const FormalMap& g_;
  int kappa_;
  std::vector<int> orders_;
  std::vector<std::vector<TruncatedSeries>> powers_;
};

}  // namespace detail

// f o g, exact modulo degree > min(kappa_f, kappa_g).
inline TruncatedSeries compose(const TruncatedSeries& f, const FormalMap& g) {
  if (f.arity() != g.target_arity()) throw StructuralError("compose: arity mismatch");
  for (const auto& c : g.components()) {
    if (!c.constant_term().is_zero()) throw PreconditionError("compose: substituted map has a nonzero constant term");
  }
  const int kappa = std::min(f.kappa(), g.kappa());
  detail::Substitution sub(g, kappa);
  return sub.run(f.truncated(kappa));
}

inline FormalMap compose(const FormalMap& outer, const FormalMap& inner) {
  if (outer.source_arity() != inner.target_arity()) throw StructuralError("compose: arity mismatch");
  for (const auto& c : inner.components()) {
    if (!c.constant_term().is_zero()) throw PreconditionError("compose: substituted map has a nonzero constant term");
  }
  std::vector<TruncatedSeries> out;
  out.reserve(outer.target_arity());
  for (const auto& f : outer.components()) {
    const int kappa = std::min(f.kappa(), inner.kappa());
    detail::Substitution sub(inner, kappa);
    out.push_back(sub.run(f.truncated(kappa)));
  }
  return {inner.source_arity(), std::move(out), outer.vanishes_at_origin()};
}

inline std::vector<std::string> default_names(std::size_t arity, std::string_view stem = "x") {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity; ++i) names.push_back(std::string(stem) + std::to_string(i + 1));
  return names;
}

// Canonical text: graded-lex terms, e.g. "2*i*x1*x2 - 1/2*x3^2".
inline std::string to_text(const TruncatedSeries& f, const std::vector<std::string>& names) {
  if (names.size() != f.arity()) throw StructuralError("to_text: name table size mismatch");
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : f.terms()) {
    std::string mono;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      const unsigned e = t.exponent[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e > 1) mono += "^" + std::to_string(e);
    }
    GaussianRational c = t.coeff;
    bool negative = false;
    if ((c.is_real() && sgn(c.real()) < 0) || (sgn(c.real()) == 0 && sgn(c.imag()) < 0)) {
      negative = true;
      c = -c;
    }
    std::string coeff = c.to_string();
    if (!c.is_real() && sgn(c.real()) != 0) coeff = "(" + coeff + ")";
    std::string body;
    if (mono.empty()) {
      body = coeff;
    } else if (c.is_one()) {
      body = mono;
    } else {
      body = coeff + "*" + mono;
    }
    if (first) {
      out = negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

inline std::string to_text(const TruncatedSeries& f) { return to_text(f, default_names(f.arity())); }

}  // namespace segre
