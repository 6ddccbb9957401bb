#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "segre/errors.hpp"
#include "segre/linalg.hpp"
#include "segre/manifold.hpp"
#include "segre/series.hpp"

namespace segre {

namespace detail {

// d x d matrix of w-derivatives of rho at the origin.
inline QiMatrix w_jacobian_at_origin(const FormalMap& rho, const AmbientLayout& L) {
  QiMatrix A(L.d, L.d);
  for (std::size_t l = 0; l < L.d; ++l) {
    for (std::size_t m = 0; m < L.d; ++m) {
      A(l, m) = rho[l].coefficient(ExponentVector::unit(L.arity(), L.w(m)));
    }
  }
  return A;
}

// The ambient substitution (z, w, chi, tau) -> (z, W, chi, tau).
inline FormalMap replace_w(const FormalMap& W, const AmbientLayout& L, int kappa) {
  std::vector<TruncatedSeries> c;
  for (std::size_t k = 0; k < L.arity(); ++k) {
    if (k >= L.w(0) && k < L.w(0) + L.d) {
      c.push_back(W[k - L.w(0)].truncated(std::min(kappa, W[k - L.w(0)].kappa())));
    } else {
      c.push_back(TruncatedSeries::variable(L.arity(), kappa, k));
    }
  }
  return {L.arity(), std::move(c)};
}

// The ambient substitution (z, w, chi, tau) -> (z, w, chi, T).
inline FormalMap replace_tau(const FormalMap& T, const AmbientLayout& L, int kappa) {
  std::vector<TruncatedSeries> c;
  for (std::size_t k = 0; k < L.arity(); ++k) {
    if (k >= L.tau(0) && k < L.tau(0) + L.d) {
      c.push_back(T[k - L.tau(0)].truncated(std::min(kappa, T[k - L.tau(0)].kappa())));
    } else {
      c.push_back(TruncatedSeries::variable(L.arity(), kappa, k));
    }
  }
  return {L.arity(), std::move(c)};
}

struct SplitRho {
  QiMatrix A_inv;
  std::vector<TruncatedSeries> remainder;  // rho - A w
};

inline SplitRho split_rho(const FormalMap& rho, const AmbientLayout& L) {
  if (rho.target_arity() != L.d || rho.source_arity() != L.arity()) {
    throw StructuralError("solve_graph: rho must have d components in 2N variables");
  }
  for (const auto& r : rho.components()) {
    if (!r.constant_term().is_zero()) throw PreconditionError("solve_graph: rho does not vanish at the origin");
  }
  const QiMatrix A = w_jacobian_at_origin(rho, L);
  SplitRho out;
  try {
    out.A_inv = inverse(A);
  } catch (const PreconditionError&) {
    throw PreconditionError("solve_graph: d rho / d w (0) is singular under the chosen split");
  }
  for (std::size_t l = 0; l < L.d; ++l) {
    TruncatedSeries r = rho[l];
    for (std::size_t m = 0; m < L.d; ++m) {
      r -= TruncatedSeries::variable(L.arity(), r.kappa(), L.w(m), A(l, m));
    }
    out.remainder.push_back(std::move(r));
  }
  return out;
}

inline FormalMap apply_inverse(const SplitRho& s, const std::vector<TruncatedSeries>& values,
                               const AmbientLayout& L, int kappa) {
  std::vector<TruncatedSeries> q;
  for (std::size_t l = 0; l < L.d; ++l) {
    TruncatedSeries acc(L.arity(), kappa);
    for (std::size_t m = 0; m < L.d; ++m) {
      if (!s.A_inv(l, m).is_zero()) acc -= values[m] * s.A_inv(l, m);
    }
    q.push_back(std::move(acc));
  }
  return {L.arity(), std::move(q)};
}

inline GraphForm finish_graph(FormalMap Q, const AmbientLayout& L, int kappa) {
  std::vector<TruncatedSeries> qbar;
  for (const auto& q : Q.components()) qbar.push_back(sigma(q, L.split()));
  return {std::move(Q), FormalMap(L.arity(), std::move(qbar)), kappa};
}

}  // namespace detail

// Formal implicit function theorem. Writing rho = A w + R with A the
// constant matrix d rho / d w (0), the graph satisfies Q = -A^{-1} R(z, Q,
// chi, tau); the degree-k part of the right side only involves parts of Q
// of degree < k, so one substitution per degree fixes Q through degree k.
inline GraphForm solve_graph(const FormalMap& rho, const AmbientLayout& L, int kappa) {
  kappa = std::min(kappa, rho.kappa());
  const detail::SplitRho s = detail::split_rho(rho, L);
  FormalMap Q(L.arity(), std::vector<TruncatedSeries>(L.d, TruncatedSeries(L.arity(), kappa)));
  for (int k = 1; k <= kappa; ++k) {
    const FormalMap sub = detail::replace_w(Q, L, kappa);
    std::vector<TruncatedSeries> values;
    // Degree k of Q only needs every series up to degree k.
    for (const auto& r : s.remainder) values.push_back(compose(r.truncated(k), sub));
    FormalMap next = detail::apply_inverse(s, values, L, kappa);
    std::vector<TruncatedSeries> parts;
    for (const auto& c : next.components()) {
      const TruncatedSeries low = c.lower_part(k);
      parts.push_back(TruncatedSeries::from_terms(L.arity(), kappa, low.terms()));
    }
    Q = FormalMap(L.arity(), std::move(parts));
  }
  return detail::finish_graph(std::move(Q), L, kappa);
}

// Same graph by plain fixed-point iteration at full order until nothing
// changes. Independent of the degree bookkeeping above.
inline GraphForm solve_graph_fixed_point(const FormalMap& rho, const AmbientLayout& L, int kappa) {
  kappa = std::min(kappa, rho.kappa());
  const detail::SplitRho s = detail::split_rho(rho, L);
  FormalMap Q(L.arity(), std::vector<TruncatedSeries>(L.d, TruncatedSeries(L.arity(), kappa)));
  for (int iter = 0; iter <= kappa + 1; ++iter) {
    const FormalMap sub = detail::replace_w(Q, L, kappa);
    std::vector<TruncatedSeries> values;
    for (const auto& r : s.remainder) values.push_back(compose(r.truncated(kappa), sub));
    FormalMap next = detail::apply_inverse(s, values, L, kappa);
    if (next == Q) break;
    Q = std::move(next);
  }
  return detail::finish_graph(std::move(Q), L, kappa);
}

// Builds the GraphForm of data already in graph form.
inline GraphForm graph_from_Q(FormalMap Q, const AmbientLayout& L) {
  const int kappa = Q.kappa();
  return detail::finish_graph(std::move(Q), L, kappa);
}

struct RealityCheck {
  bool holds = false;
  std::optional<ExponentVector> witness;  // first offending monomial
  std::string witness_text;
};

// Q(z, chi, Qbar(chi, z, w)) = w, exactly modulo degree > valid_order.
inline RealityCheck check_reality(const GraphForm& g, const AmbientLayout& L) {
  const FormalMap sub = detail::replace_tau(g.Qbar, L, g.valid_order);
  const VariableTable names = L.graph_names();
  for (std::size_t l = 0; l < L.d; ++l) {
    TruncatedSeries lhs = compose(g.Q[l].truncated(std::min(g.valid_order, g.Q[l].kappa())), sub);
    TruncatedSeries diff = lhs - TruncatedSeries::variable(L.arity(), lhs.kappa(), L.w(l));
    if (!diff.is_zero()) {
      RealityCheck r;
      r.witness = diff.terms().front().exponent;
      r.witness_text = "component " + std::to_string(l + 1) + ": " +
                       to_text(TruncatedSeries::from_terms(L.arity(), diff.kappa(), {diff.terms().front()}), names);
      return r;
    }
  }
  return {true, std::nullopt, ""};
}

// g lies in the truncated ideal generated by w - Q(z, chi, tau).
inline bool ideal_member(const TruncatedSeries& g, const GraphForm& graph, const AmbientLayout& L) {
  if (g.arity() != L.arity()) throw StructuralError("ideal_member: series must live in the ambient ring");
  const int kappa = std::min(g.kappa(), graph.valid_order);
  return compose(g.truncated(kappa), detail::replace_w(graph.Q, L, kappa)).is_zero();
}

inline bool ideal_member(const TruncatedSeries& g, const GenericManifold& m) {
  return ideal_member(g, m.graph, m.layout);
}

}  // namespace segre
