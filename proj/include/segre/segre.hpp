#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "segre/errors.hpp"
#include "segre/manifold.hpp"
#include "segre/series.hpp"
#include "segre/vector_fields.hpp"

namespace segre {

// Variables of the iterated maps come in blocks t^1, t^2, ... of n each;
// variable l (0-based) of block b (1-based) has index (b - 1) n + l.
struct BlockLayout {
  std::size_t n = 0;

  std::size_t index(std::size_t block, std::size_t l) const noexcept { return (block - 1) * n + l; }
  std::size_t arity(std::size_t blocks) const noexcept { return blocks * n; }

  std::vector<std::string> names(std::size_t blocks, std::string_view stem = "t") const {
    std::vector<std::string> out;
    for (std::size_t b = 1; b <= blocks; ++b) {
      for (std::size_t l = 0; l < n; ++l) {
        std::string s = std::string(stem) + std::to_string(b);
        if (n > 1) s += "_" + std::to_string(l + 1);
        out.push_back(std::move(s));
      }
    }
    return out;
  }
};

// gamma(zeta, t): N components in the N + n variables (chi, tau, t).
struct SegreMapping {
  FormalMap gamma;
  std::string convention = "graph-special";
};

// gamma(zeta, t) = (t, Q(t, zeta)).
inline SegreMapping make_gamma(const GenericManifold& m) {
  const AmbientLayout& L = m.layout;
  const std::size_t n = L.n();
  const std::size_t arity = L.N + n;
  std::vector<std::optional<std::size_t>> q_map(L.arity());
  for (std::size_t i = 0; i < n; ++i) {
    q_map[L.z(i)] = L.N + i;
    q_map[L.chi(i)] = i;
  }
  for (std::size_t l = 0; l < L.d; ++l) q_map[L.tau(l)] = n + l;
  std::vector<TruncatedSeries> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(TruncatedSeries::variable(arity, m.kappa, L.N + i));
  for (std::size_t l = 0; l < L.d; ++l) c.push_back(relabel(m.graph.Q[l], arity, q_map));
  return {FormalMap(arity, std::move(c))};
}

struct IteratedSegre {
  std::size_t j = 0;
  FormalMap v;   // jn variables -> N components
  FormalMap nu;  // the w-part
};

inline constexpr std::size_t default_variable_cap(std::size_t n, std::size_t d) { return 4 * (d + 1) * n; }

// v^1(t^1) = gamma(0, t^1), v^{j+1}(t^1..t^{j+1}) = gamma(conj(v^j)(t^1..t^j), t^{j+1}).
// Iterates are built incrementally and cached.
class SegreChain {
 public:
  SegreChain(SegreMapping gamma, std::size_t N, std::size_t n, std::size_t variable_cap)
      : gamma_(std::move(gamma)), N_(N), n_(n), cap_(std::min(variable_cap, kMaxVariables)) {}

  explicit SegreChain(const GenericManifold& m)
      : SegreChain(make_gamma(m), m.N(), m.n(), default_variable_cap(m.n(), m.d())) {}

  std::size_t N() const noexcept { return N_; }
  std::size_t n() const noexcept { return n_; }
  BlockLayout blocks() const noexcept { return {n_}; }
  const SegreMapping& gamma() const noexcept { return gamma_; }

  const IteratedSegre& iterate(std::size_t j) {
    if (j < 1) throw PreconditionError("iterate: j must be >= 1");
    if (j * n_ > cap_) {
      throw PreconditionError("iterate: " + std::to_string(j * n_) + " variables exceed the cap of " +
                              std::to_string(cap_));
    }
    while (cache_.size() < j) extend();
    return cache_[j - 1];
  }

  const FormalMap& v(std::size_t j) { return iterate(j).v; }

 private:
  void extend() {
    const std::size_t j = cache_.size() + 1;
    const std::size_t arity = j * n_;
    const std::size_t src = gamma_.gamma.source_arity();
    std::vector<TruncatedSeries> sub;
    sub.reserve(src);
    const int kappa = gamma_.gamma.kappa();
    for (std::size_t k = 0; k < N_; ++k) {
      if (j == 1) {
        sub.emplace_back(arity, kappa);
      } else {
        sub.push_back(embed(cache_.back().v[k].conj(), arity));
      }
    }
    for (std::size_t l = 0; l < n_; ++l) sub.push_back(TruncatedSeries::variable(arity, kappa, (j - 1) * n_ + l));
    FormalMap v = compose(gamma_.gamma, FormalMap(arity, std::move(sub)));
    std::vector<TruncatedSeries> nu(v.components().begin() + static_cast<std::ptrdiff_t>(n_), v.components().end());
    FormalMap nu_map(arity, std::move(nu));
    cache_.push_back({j, std::move(v), std::move(nu_map)});
  }

  SegreMapping gamma_;
  std::size_t N_;
  std::size_t n_;
  std::size_t cap_;
  std::vector<IteratedSegre> cache_;
};

inline FormalMap embed(const FormalMap& f, std::size_t new_arity, std::size_t offset = 0) {
  std::vector<TruncatedSeries> c;
  for (const auto& s : f.components()) c.push_back(embed(s, new_arity, offset));
  return {new_arity, std::move(c)};
}

inline FormalMap relabel(const FormalMap& f, std::size_t new_arity, const std::vector<std::optional<std::size_t>>& mapping) {
  std::vector<TruncatedSeries> c;
  for (const auto& s : f.components()) c.push_back(relabel(s, new_arity, mapping));
  return {new_arity, std::move(c)};
}

inline FormalMap zero_map(std::size_t source_arity, std::size_t target_arity, int kappa) {
  return {source_arity, std::vector<TruncatedSeries>(target_arity, TruncatedSeries(source_arity, kappa))};
}

struct IdentityCheck {
  bool holds = true;
  std::string witness;
};

// z-part of v^j is t^j.
inline IdentityCheck check_z_part(SegreChain& chain, std::size_t j) {
  const FormalMap& v = chain.v(j);
  for (std::size_t l = 0; l < chain.n(); ++l) {
    if (v[l] != TruncatedSeries::variable(v.source_arity(), v[l].kappa(), chain.blocks().index(j, l))) {
      return {false, "z-part of v^" + std::to_string(j) + " differs from t^" + std::to_string(j)};
    }
  }
  return {};
}

// v^{j+1}(0, t^2..t^{j+1}) = v^j(t^2..t^{j+1}).
inline IdentityCheck check_first_block_collapse(SegreChain& chain, std::size_t j) {
  const std::size_t n = chain.n();
  const FormalMap& big = chain.v(j + 1);
  std::vector<std::optional<std::size_t>> m((j + 1) * n);
  for (std::size_t k = n; k < (j + 1) * n; ++k) m[k] = k - n;
  const FormalMap lhs = relabel(big, j * n, m);
  const FormalMap& rhs = chain.v(j);
  for (std::size_t c = 0; c < chain.N(); ++c) {
    if (!agree(lhs[c], rhs[c])) {
      return {false, "v^" + std::to_string(j + 1) + "(0, t^2..) != v^" + std::to_string(j) + " in component " +
                         std::to_string(c + 1)};
    }
  }
  return {};
}

// v^{j+1} restricted to t^{j+1} = t^{j-1} equals v^{j-1}, for j >= 2.
inline IdentityCheck check_return_collapse(SegreChain& chain, std::size_t j) {
  if (j < 2) throw PreconditionError("check_return_collapse: j must be >= 2");
  const std::size_t n = chain.n();
  const BlockLayout B = chain.blocks();
  const FormalMap& big = chain.v(j + 1);
  std::vector<std::optional<std::size_t>> m((j + 1) * n);
  for (std::size_t k = 0; k < j * n; ++k) m[k] = k;
  for (std::size_t l = 0; l < n; ++l) m[B.index(j + 1, l)] = B.index(j - 1, l);
  const FormalMap lhs = relabel(big, j * n, m);
  const FormalMap rhs = embed(chain.v(j - 1), j * n);
  for (std::size_t c = 0; c < chain.N(); ++c) {
    if (!agree(lhs[c], rhs[c])) {
      return {false, "v^" + std::to_string(j + 1) + "|t^" + std::to_string(j + 1) + "=t^" + std::to_string(j - 1) +
                         " != v^" + std::to_string(j - 1) + " in component " + std::to_string(c + 1)};
    }
  }
  return {};
}

// Series in kN variables: rho evaluated at (block a, block b) of the Segre
// manifold coordinates; an empty block stands for 0.
inline TruncatedSeries rho_on_blocks(const TruncatedSeries& rho, std::size_t N, std::size_t arity,
                                     std::optional<std::size_t> z_block, std::optional<std::size_t> zeta_block) {
  std::vector<std::optional<std::size_t>> m(2 * N);
  for (std::size_t k = 0; k < N; ++k) {
    if (z_block) m[k] = *z_block * N + k;
    if (zeta_block) m[N + k] = *zeta_block * N + k;
  }
  return relabel(rho, arity, m);
}

// T^k = (v^k, conj v^{k-1}, v^{k-2}, ...) parametrizing the k-th Segre
// manifold, with its ideal generators rho(Z, zeta^1), rho(Z^1, zeta^1), ...
struct SegreManifoldParam {
  std::size_t k = 0;
  FormalMap T;
  std::vector<TruncatedSeries> generators;
};

inline SegreManifoldParam make_T(SegreChain& chain, const GenericManifold& m, std::size_t k) {
  if (k < 1) throw PreconditionError("make_T: k must be >= 1");
  const std::size_t N = m.N();
  const std::size_t arity = k * m.n();
  std::vector<TruncatedSeries> comps;
  for (std::size_t i = 0; i < k; ++i) {
    FormalMap block = embed(chain.v(k - i), arity);
    if (i % 2 == 1) block = block.conj();
    comps.insert(comps.end(), block.components().begin(), block.components().end());
  }
  SegreManifoldParam out{k, FormalMap(arity, std::move(comps)), {}};
  const std::size_t total = k * N;
  for (const auto& r : m.rho.components()) {
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (i % 2 == 0) {
        out.generators.push_back(rho_on_blocks(r, N, total, i, i + 1));
      } else {
        out.generators.push_back(rho_on_blocks(r, N, total, i + 1, i));
      }
    }
    const std::size_t last = k - 1;
    if (last % 2 == 0) {
      out.generators.push_back(rho_on_blocks(r, N, total, last, std::nullopt));
    } else {
      out.generators.push_back(rho_on_blocks(r, N, total, std::nullopt, last));
    }
  }
  return out;
}

// Theta^j(t^1..t^{j+1}) = (v^{j+1}(t^1..t^j, t^{j+1} + t^{j-1}), conj v^j(t^1..t^j)),
// Theta^0(t^1) = (v^1(t^1), 0).
inline FormalMap make_theta(SegreChain& chain, std::size_t j) {
  const std::size_t n = chain.n();
  const std::size_t N = chain.N();
  const std::size_t arity = (j + 1) * n;
  if (j == 0) {
    const FormalMap& v1 = chain.v(1);
    const FormalMap zero = zero_map(arity, N, v1.kappa());
    return concat({&v1, &zero});
  }
  const BlockLayout B = chain.blocks();
  const FormalMap& big = chain.v(j + 1);
  std::vector<TruncatedSeries> shift;
  for (std::size_t k = 0; k < arity; ++k) shift.push_back(TruncatedSeries::variable(arity, big.kappa(), k));
  if (j >= 2) {
    for (std::size_t l = 0; l < n; ++l) {
      shift[B.index(j + 1, l)] += TruncatedSeries::variable(arity, big.kappa(), B.index(j - 1, l));
    }
  }
  const FormalMap Zpart = compose(big, FormalMap(arity, std::move(shift)));
  const FormalMap zeta = embed(chain.v(j).conj(), arity);
  return concat({&Zpart, &zeta});
}

// Phi^j(t^1..t^j) = (v^{j-1}(t^1..t^{j-1}), conj v^j(t^1..t^j)), Phi^1 = (0, conj v^1).
inline FormalMap make_phi(SegreChain& chain, std::size_t j) {
  if (j < 1) throw PreconditionError("make_phi: j must be >= 1");
  const std::size_t arity = j * chain.n();
  const FormalMap zeta = chain.v(j).conj();
  if (j == 1) {
    const FormalMap zero = zero_map(arity, chain.N(), zeta.kappa());
    return concat({&zero, &zeta});
  }
  const FormalMap Zpart = embed(chain.v(j - 1), arity);
  return concat({&Zpart, &zeta});
}

struct ThetaPhi {
  std::size_t j = 0;
  FormalMap theta;
  std::optional<FormalMap> phi;  // Phi^j, defined for j >= 1
};

inline ThetaPhi make_theta_phi(SegreChain& chain, std::size_t j) {
  ThetaPhi out{j, make_theta(chain, j), std::nullopt};
  if (j >= 1) out.phi = make_phi(chain, j);
  return out;
}

// rho o F = 0 for a map F into C^N x C^N.
inline IdentityCheck check_maps_into_manifold(const FormalMap& F, const GenericManifold& m, const std::string& label) {
  for (std::size_t l = 0; l < m.d(); ++l) {
    TruncatedSeries r = compose(m.rho[l], F);
    if (!r.is_zero()) return {false, label + ": rho_" + std::to_string(l + 1) + " o map = " + to_text(r)};
  }
  return {};
}

// Theta^j(t^1..t^j, 0) = Phi^j(t^1..t^j).
inline IdentityCheck check_theta_restricts_to_phi(SegreChain& chain, std::size_t j) {
  const std::size_t n = chain.n();
  const FormalMap theta = make_theta(chain, j);
  const FormalMap phi = make_phi(chain, j);
  std::vector<std::optional<std::size_t>> m((j + 1) * n);
  for (std::size_t k = 0; k < j * n; ++k) m[k] = k;
  const FormalMap restricted = relabel(theta, j * n, m);
  for (std::size_t c = 0; c < phi.target_arity(); ++c) {
    if (!agree(restricted[c], phi[c])) {
      return {false, "Theta^" + std::to_string(j) + "(.., 0) != Phi^" + std::to_string(j) + " in component " +
                         std::to_string(c + 1)};
    }
  }
  return {};
}

// d/dt^{j+1}_l (f o Theta^j) = (Lt_l f) o Theta^j and
// d/dt^{j+1}_l (f o Phi^{j+1}) = (L_l f) o Phi^{j+1}.
inline IdentityCheck check_pushforward(SegreChain& chain, const CrBasis& basis, const TruncatedSeries& f, std::size_t j) {
  const BlockLayout B = chain.blocks();
  const FormalMap theta = make_theta(chain, j);
  const FormalMap phi = make_phi(chain, j + 1);
  const TruncatedSeries f_theta = compose(f, theta);
  const TruncatedSeries f_phi = compose(f, phi);
  for (std::size_t l = 0; l < chain.n(); ++l) {
    const std::size_t var = B.index(j + 1, l);
    const TruncatedSeries lhs_t = partial_derivative(f_theta, var);
    const TruncatedSeries rhs_t = compose(apply(basis.L_tilde[l], f), theta);
    if (!agree(lhs_t, rhs_t)) {
      return {false, "Theta^" + std::to_string(j) + " pushforward fails for Lt" + std::to_string(l + 1)};
    }
    const TruncatedSeries lhs_p = partial_derivative(f_phi, var);
    const TruncatedSeries rhs_p = compose(apply(basis.L[l], f), phi);
    if (!agree(lhs_p, rhs_p)) {
      return {false, "Phi^" + std::to_string(j + 1) + " pushforward fails for L" + std::to_string(l + 1)};
    }
  }
  return {};
}

}  // namespace segre
