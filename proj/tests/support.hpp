#pragma once

// Test-side helpers: a dense polynomial oracle that shares no code with the
// engine's series arithmetic, plus generators of random manifolds and maps.

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "segre/frontend.hpp"
#include "segre/gaussian_rational.hpp"
#include "segre/series.hpp"

namespace segre {

// Readable gtest failure messages.
inline void PrintTo(const TruncatedSeries& s, std::ostream* os) { *os << to_text(s) << " + O(" << s.kappa() + 1 << ")"; }
inline void PrintTo(const FormalMap& f, std::ostream* os) {
  *os << "(";
  for (std::size_t k = 0; k < f.target_arity(); ++k) *os << (k ? ", " : "") << to_text(f[k]);
  *os << ")";
}

}  // namespace segre

namespace segre::testing {

// Polynomial as a map from exponent tuples to coefficients; no truncation.
struct Dense {
  std::size_t arity = 0;
  std::map<std::vector<unsigned>, GaussianRational> c;

  static Dense zero(std::size_t arity) { return {arity, {}}; }
  static Dense one(std::size_t arity) {
    Dense d{arity, {}};
    d.c[std::vector<unsigned>(arity, 0)] = 1;
    return d;
  }
  static Dense var(std::size_t arity, std::size_t k, GaussianRational coeff = 1) {
    Dense d{arity, {}};
    std::vector<unsigned> e(arity, 0);
    e[k] = 1;
    d.c[e] = coeff;
    return d;
  }

  void clean() {
    for (auto it = c.begin(); it != c.end();) it = it->second.is_zero() ? c.erase(it) : std::next(it);
  }

  Dense operator+(const Dense& o) const {
    Dense r = *this;
    for (const auto& [e, v] : o.c) r.c[e] += v;
    r.clean();
    return r;
  }
  Dense operator-(const Dense& o) const {
    Dense r = *this;
    for (const auto& [e, v] : o.c) r.c[e] -= v;
    r.clean();
    return r;
  }
  Dense operator*(const Dense& o) const {
    Dense r{arity, {}};
    for (const auto& [ea, va] : c) {
      for (const auto& [eb, vb] : o.c) {
        std::vector<unsigned> e(arity);
        for (std::size_t k = 0; k < arity; ++k) e[k] = ea[k] + eb[k];
        r.c[e] += va * vb;
      }
    }
    r.clean();
    return r;
  }
  Dense scaled(const GaussianRational& s) const {
    Dense r = *this;
    for (auto& [e, v] : r.c) v *= s;
    r.clean();
    return r;
  }

  Dense truncated(unsigned kappa) const {
    Dense r{arity, {}};
    for (const auto& [e, v] : c) {
      unsigned deg = 0;
      for (unsigned x : e) deg += x;
      if (deg <= kappa) r.c[e] = v;
    }
    return r;
  }

  Dense derivative(std::size_t k) const {
    Dense r{arity, {}};
    for (const auto& [e, v] : c) {
      if (e[k] == 0) continue;
      std::vector<unsigned> f = e;
      --f[k];
      r.c[f] += v * GaussianRational(static_cast<long>(e[k]));
    }
    r.clean();
    return r;
  }

  // Substitutes subs[k] for variable k by expanding every monomial.
  Dense substitute(const std::vector<Dense>& subs) const {
    const std::size_t out_arity = subs.empty() ? 0 : subs[0].arity;
    Dense r{out_arity, {}};
    for (const auto& [e, v] : c) {
      Dense term = one(out_arity).scaled(v);
      for (std::size_t k = 0; k < arity; ++k) {
        for (unsigned p = 0; p < e[k]; ++p) term = term * subs[k];
      }
      r = r + term;
    }
    return r;
  }

  GaussianRational eval(const std::vector<GaussianRational>& x) const {
    GaussianRational s;
    for (const auto& [e, v] : c) {
      GaussianRational t = v;
      for (std::size_t k = 0; k < arity; ++k) {
        for (unsigned p = 0; p < e[k]; ++p) t *= x[k];
      }
      s += t;
    }
    return s;
  }

  TruncatedSeries to_series(int kappa) const {
    std::vector<Term> terms;
    for (const auto& [e, v] : c) {
      ExponentVector x(arity);
      for (std::size_t k = 0; k < arity; ++k) x.set(k, e[k]);
      terms.push_back({x, v});
    }
    return TruncatedSeries::from_terms(arity, kappa, std::move(terms));
  }

  static Dense from_series(const TruncatedSeries& s) {
    Dense d{s.arity(), {}};
    for (const auto& t : s.terms()) {
      std::vector<unsigned> e(s.arity());
      for (std::size_t k = 0; k < s.arity(); ++k) e[k] = t.exponent[k];
      d.c[e] = t.coeff;
    }
    return d;
  }
};

// Leibniz-formula determinant of a square dense matrix.
inline Dense leibniz_det(const std::vector<std::vector<Dense>>& M, std::size_t arity) {
  const std::size_t n = M.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) perm[k] = k;
  Dense det = Dense::zero(arity);
  do {
    std::size_t inversions = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) inversions += perm[a] > perm[b] ? 1 : 0;
    }
    Dense term = Dense::one(arity);
    for (std::size_t r = 0; r < n; ++r) term = term * M[r][perm[r]];
    det = inversions % 2 ? det - term : det + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

// Largest s with a nonzero s x s minor, by trying every minor.
inline std::size_t brute_force_rank(const std::vector<std::vector<Dense>>& M, std::size_t arity) {
  const std::size_t rows = M.size();
  const std::size_t cols = rows ? M[0].size() : 0;
  std::size_t best = 0;
  for (std::size_t s = 1; s <= std::min(rows, cols); ++s) {
    bool found = false;
    std::vector<std::size_t> rs = first_combination(s);
    do {
      std::vector<std::size_t> cs = first_combination(s);
      do {
        std::vector<std::vector<Dense>> sub(s, std::vector<Dense>(s));
        for (std::size_t i = 0; i < s; ++i) {
          for (std::size_t j = 0; j < s; ++j) sub[i][j] = M[rs[i]][cs[j]];
        }
        if (!leibniz_det(sub, arity).c.empty()) found = true;
      } while (!found && next_combination(cs, cols));
    } while (!found && next_combination(rs, rows));
    if (!found) break;
    best = s;
  }
  return best;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
  bool coin() { return integer(0, 1) == 1; }

  // a + b i with |a|, |b| <= height, not both zero.
  GaussianRational gaussian(long height) {
    for (;;) {
      const long a = integer(-height, height);
      const long b = integer(-height, height);
      if (a || b) return {mpq_class(a), mpq_class(b)};
    }
  }

  GaussianRational rational(long height) {
    for (;;) {
      const long num = integer(-height, height);
      const long den = integer(1, height);
      const long inum = integer(-height, height);
      if (num || inum) return GaussianRational::fraction(num, den, inum, den);
    }
  }

  ExponentVector exponent(std::size_t arity, unsigned max_degree, unsigned min_degree = 0) {
    for (;;) {
      ExponentVector e(arity);
      unsigned deg = 0;
      for (std::size_t k = 0; k < arity; ++k) {
        const unsigned x = static_cast<unsigned>(integer(0, max_degree));
        e.set(k, x);
        deg += x;
      }
      if (deg >= min_degree && deg <= max_degree) return e;
    }
  }

  TruncatedSeries series(std::size_t arity, int kappa, std::size_t terms, unsigned max_degree, long height = 4,
                         unsigned min_degree = 0) {
    std::vector<Term> t;
    for (std::size_t k = 0; k < terms; ++k) t.push_back({exponent(arity, max_degree, min_degree), gaussian(height)});
    return TruncatedSeries::from_terms(arity, kappa, std::move(t));
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Rigid graph manifold w = tau + phi(z, chi) with phi(z, chi) = -conj(phi)(chi, z),
// phi of bidegree >= (1, 1) and total degree <= max_degree.
inline ManifoldSpec random_rigid_spec(Rng& rng, std::size_t N, std::size_t d, unsigned max_degree = 4,
                                      std::size_t pairs = 2) {
  const AmbientLayout L{N, d};
  const std::size_t n = L.n();
  std::vector<std::string> exprs;
  for (std::size_t l = 0; l < d; ++l) {
    TruncatedSeries phi(L.arity(), static_cast<int>(max_degree));
    for (std::size_t p = 0; p < pairs; ++p) {
      ExponentVector a(L.arity());
      ExponentVector b(L.arity());
      unsigned da = 0;
      unsigned db = 0;
      while (da == 0 || db == 0 || da + db > max_degree) {
        da = db = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto x = static_cast<unsigned>(rng.integer(0, 2));
          const auto y = static_cast<unsigned>(rng.integer(0, 2));
          a.set(L.z(i), x);
          a.set(L.chi(i), 0);
          b.set(L.chi(i), y);
          b.set(L.z(i), 0);
          da += x;
          db += y;
        }
      }
      // c z^alpha chi^beta - conj(c) z^beta chi^alpha
      ExponentVector mono(L.arity());
      ExponentVector swapped(L.arity());
      for (std::size_t i = 0; i < n; ++i) {
        mono.set(L.z(i), a[L.z(i)]);
        mono.set(L.chi(i), b[L.chi(i)]);
        swapped.set(L.z(i), b[L.chi(i)]);
        swapped.set(L.chi(i), a[L.z(i)]);
      }
      const GaussianRational c = rng.gaussian(4);
      phi += TruncatedSeries::from_terms(L.arity(), phi.kappa(), {{mono, c}, {swapped, -c.conj()}});
    }
    exprs.push_back("ta" + std::to_string(l + 1) + " + " + (phi.is_zero() ? "0" : to_text(phi, L.graph_names())));
  }
  return {static_cast<int>(N), static_cast<int>(d), ManifoldSpec::Form::graph, exprs, std::nullopt};
}

// rho'(Z, zeta) = rho(A^{-1} Z, conj(A)^{-1} zeta) in rho form.
inline ManifoldSpec linear_change(const GenericManifold& m, const QiMatrix& A) {
  const std::size_t N = m.N();
  const QiMatrix Ainv = inverse(A);
  const int kappa = m.kappa;
  std::vector<TruncatedSeries> sub;
  for (std::size_t blk = 0; blk < 2; ++blk) {
    for (std::size_t r = 0; r < N; ++r) {
      TruncatedSeries s(2 * N, kappa);
      for (std::size_t c = 0; c < N; ++c) {
        const GaussianRational a = blk == 0 ? Ainv(r, c) : Ainv(r, c).conj();
        if (!a.is_zero()) s += TruncatedSeries::variable(2 * N, kappa, blk * N + c, a);
      }
      sub.push_back(std::move(s));
    }
  }
  const FormalMap S(2 * N, std::move(sub));
  std::vector<std::string> exprs;
  for (const auto& r : m.rho.components()) exprs.push_back(to_text(compose(r, S), m.layout.rho_names()));
  return {static_cast<int>(N), static_cast<int>(m.d()), ManifoldSpec::Form::rho, exprs, std::nullopt};
}

inline QiMatrix random_invertible(Rng& rng, std::size_t N) {
  for (;;) {
    QiMatrix A(N, N);
    for (std::size_t r = 0; r < N; ++r) {
      for (std::size_t c = 0; c < N; ++c) {
        A(r, c) = rng.integer(0, 2) == 0 ? GaussianRational() : rng.rational(3);
      }
    }
    if (rank(A) == N) return A;
  }
}

inline std::vector<std::string> fixture_names() { return {"h", "flat", "l4", "c2"}; }

inline GenericManifold load_fixture(const std::string& name, int kappa = 8) {
  return load_manifold(fixture(name), kappa);
}

}  // namespace segre::testing
