#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "segre/errors.hpp"
#include "segre/frontend.hpp"
#include "segre/linalg.hpp"
#include "segre/manifold.hpp"
#include "segre/segre.hpp"
#include "segre/series.hpp"

namespace segre {

using SeriesMatrix = Matrix<TruncatedSeries>;

inline constexpr std::uint64_t kDefaultSeed = 0x5E6A77AULL;

struct RankOptions {
  std::uint64_t seed = kDefaultSeed;
  int trials = 3;
  std::int64_t range = std::int64_t{1} << 16;  // points drawn from [-range, range] \ {0}
  int retries = 1;
  bool check_upper = true;
  int escalations = 2;
  int escalation_step = 4;
  unsigned jobs = 1;
};

// Entry (i, j) is dF_i / dx_j.
inline SeriesMatrix jacobian(const FormalMap& F) {
  SeriesMatrix J(F.target_arity(), F.source_arity());
  for (std::size_t i = 0; i < F.target_arity(); ++i) {
    for (std::size_t j = 0; j < F.source_arity(); ++j) J(i, j) = partial_derivative(F[i], j);
  }
  return J;
}

struct RankWitness {
  enum class Kind { none, coefficient, evaluation };
  Kind kind = Kind::none;
  std::optional<ExponentVector> exponent;
  GaussianRational value;
  std::vector<GaussianRational> point;
};

struct RankCertificate {
  std::size_t rank = 0;
  std::vector<std::size_t> minor_rows;
  std::vector<std::size_t> minor_cols;
  RankWitness witness;
  int kappa_used = 0;
  bool stable = false;
  bool upper_checked = false;  // every (rank+1)-minor was expanded and found zero
  std::string method;          // "screened", "exhaustive" or "trivial"
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (salt * 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

inline std::vector<GaussianRational> random_point(std::size_t arity, std::int64_t range, std::uint64_t& state) {
  std::vector<GaussianRational> p;
  p.reserve(arity);
  const auto width = static_cast<std::uint64_t>(range);
  for (std::size_t k = 0; k < arity; ++k) {
    const auto r = static_cast<std::int64_t>(splitmix64(state) % (2 * width)) - range;
    p.emplace_back(static_cast<long>(r >= 0 ? r + 1 : r));
  }
  return p;
}

inline int matrix_kappa(const SeriesMatrix& M) {
  int k = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) k = std::min(k, M(i, j).kappa());
  }
  return k == std::numeric_limits<int>::max() ? 0 : k;
}

inline std::size_t matrix_arity(const SeriesMatrix& M) { return M.rows() && M.cols() ? M(0, 0).arity() : 0; }

// Cofactor expansion along the column with the fewest nonzero entries.
inline TruncatedSeries minor_det(const SeriesMatrix& M, const std::vector<std::size_t>& rows,
                                 const std::vector<std::size_t>& cols, std::size_t arity, int kappa) {
  if (rows.empty()) return TruncatedSeries::constant(arity, kappa, 1);
  if (rows.size() == 1) return M(rows[0], cols[0]).truncated(std::min(kappa, M(rows[0], cols[0]).kappa()));
  std::size_t best = 0;
  std::size_t best_count = rows.size() + 1;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::size_t count = 0;
    for (std::size_t r : rows) count += M(r, cols[c]).is_zero() ? 0 : 1;
    if (count < best_count) {
      best = c;
      best_count = count;
    }
  }
  TruncatedSeries det(arity, kappa);
  if (best_count == 0) return det;
  std::vector<std::size_t> sub_cols = cols;
  sub_cols.erase(sub_cols.begin() + static_cast<std::ptrdiff_t>(best));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TruncatedSeries& entry = M(rows[i], cols[best]);
    if (entry.is_zero()) continue;
    std::vector<std::size_t> sub_rows = rows;
    sub_rows.erase(sub_rows.begin() + static_cast<std::ptrdiff_t>(i));
    TruncatedSeries term = entry * minor_det(M, sub_rows, sub_cols, arity, kappa);
    if ((i + best) % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return det;
}

inline std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> first_nonzero_minor(
    const SeriesMatrix& M, std::size_t s, std::size_t arity, int kappa, TruncatedSeries* det_out) {
  if (s > M.rows() || s > M.cols()) return std::nullopt;
  std::vector<std::size_t> rows = first_combination(s);
  do {
    std::vector<std::size_t> cols = first_combination(s);
    do {
      TruncatedSeries det = minor_det(M, rows, cols, arity, kappa);
      if (!det.is_zero()) {
        if (det_out) *det_out = std::move(det);
        return std::make_pair(rows, cols);
      }
    } while (next_combination(cols, M.cols()));
  } while (next_combination(rows, M.rows()));
  return std::nullopt;
}

inline void set_coefficient_witness(RankCertificate& c, const TruncatedSeries& det) {
  c.witness.kind = RankWitness::Kind::coefficient;
  c.witness.exponent = det.terms().front().exponent;
  c.witness.value = det.terms().front().coeff;
}

}  // namespace detail

// Expanded determinant of the cited minor, at the certificate's order.
inline TruncatedSeries certificate_minor(const SeriesMatrix& M, const RankCertificate& c) {
  return detail::minor_det(M, c.minor_rows, c.minor_cols, detail::matrix_arity(M), detail::matrix_kappa(M));
}

// Re-expands the cited minor and compares with the recorded witness.
inline bool verify_certificate(const SeriesMatrix& M, const RankCertificate& c) {
  if (c.rank == 0) return c.witness.kind == RankWitness::Kind::none;
  if (c.minor_rows.size() != c.rank || c.minor_cols.size() != c.rank) return false;
  const TruncatedSeries det = certificate_minor(M, c);
  if (c.witness.kind != RankWitness::Kind::coefficient || !c.witness.exponent) return false;
  return !c.witness.value.is_zero() && det.coefficient(*c.witness.exponent) == c.witness.value;
}

// Certified lower bound on the rank of M over the fraction field.
// Screening by exact evaluation at random integer points proposes a minor;
// the minor is then expanded symbolically. Truncation is a ring
// homomorphism, so a nonzero truncated determinant certifies the rank.
inline RankCertificate generic_rank(const SeriesMatrix& M, const RankOptions& opt = {}, std::uint64_t salt = 0) {
  RankCertificate cert;
  cert.kappa_used = detail::matrix_kappa(M);
  const std::size_t cap = std::min(M.rows(), M.cols());
  const std::size_t arity = detail::matrix_arity(M);
  const int kappa = cert.kappa_used;
  cert.method = "trivial";
  if (cap == 0) {
    cert.stable = true;
    return cert;
  }

  std::uint64_t state = detail::mix_seed(opt.seed, salt);
  bool certified = false;
  for (int attempt = 0; attempt <= opt.retries && !certified; ++attempt) {
    std::size_t best = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (int t = 0; t < opt.trials; ++t) {
      const std::vector<GaussianRational> p = detail::random_point(arity, opt.range, state);
      QiMatrix E(M.rows(), M.cols());
      for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) E(i, j) = evaluate(M(i, j), p);
      }
      Echelon e = rref(E);
      if (e.pivot_cols.size() > best || rows.empty()) {
        best = e.pivot_cols.size();
        rows = e.pivot_rows;
        cols = e.pivot_cols;
      }
    }
    if (best == 0) {
      cert.rank = 0;
      cert.method = "screened";
      certified = true;
      break;
    }
    std::sort(rows.begin(), rows.end());
    TruncatedSeries det = detail::minor_det(M, rows, cols, arity, kappa);
    if (!det.is_zero()) {
      cert.rank = best;
      cert.minor_rows = rows;
      cert.minor_cols = cols;
      detail::set_coefficient_witness(cert, det);
      cert.method = "screened";
      certified = true;
    }
  }

  if (certified && opt.check_upper && cert.rank < cap) {
    cert.upper_checked = !detail::first_nonzero_minor(M, cert.rank + 1, arity, kappa, nullptr);
    if (!cert.upper_checked) certified = false;
  }

  if (!certified) {
    cert = RankCertificate{};
    cert.kappa_used = kappa;
    cert.method = "exhaustive";
    for (std::size_t s = 1; s <= cap; ++s) {
      TruncatedSeries det;
      auto found = detail::first_nonzero_minor(M, s, arity, kappa, &det);
      if (!found) {
        cert.upper_checked = true;
        break;
      }
      cert.rank = s;
      cert.minor_rows = found->first;
      cert.minor_cols = found->second;
      detail::set_coefficient_witness(cert, det);
    }
  }
  if (cert.rank == cap) cert.upper_checked = true;
  cert.stable = cert.rank == cap;
  return cert;
}

// Generic rank of dF restricted to the image of `locus` (a map from the
// s-variables into the source of F).
inline RankCertificate rank_along(const FormalMap& F, const FormalMap& locus, const RankOptions& opt = {},
                                  std::uint64_t salt = 0) {
  if (locus.target_arity() != F.source_arity()) throw StructuralError("rank_along: locus does not land in the source of F");
  const SeriesMatrix J = jacobian(F);
  SeriesMatrix R(J.rows(), J.cols());
  for (std::size_t i = 0; i < J.rows(); ++i) {
    for (std::size_t j = 0; j < J.cols(); ++j) R(i, j) = compose(J(i, j), locus);
  }
  return generic_rank(R, opt, salt);
}

// Runs fn(0..count-1) on up to `jobs` threads. Each index writes only its
// own slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < count; k = next++) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Certificates for Rk v^1 .. Rk v^J at the manifold's truncation order.
inline std::vector<RankCertificate> segre_ranks(const GenericManifold& m, std::size_t J, const RankOptions& opt) {
  SegreChain chain(m);
  std::vector<SeriesMatrix> jac;
  for (std::size_t j = 1; j <= J; ++j) jac.push_back(jacobian(chain.v(j)));
  std::vector<RankCertificate> out(J);
  parallel_for(J, opt.jobs, [&](std::size_t k) { out[k] = generic_rank(jac[k], opt, k + 1); });
  return out;
}

struct RankLevel {
  int kappa = 0;
  std::vector<std::size_t> ranks;
};

struct RankProfile {
  std::vector<std::size_t> ranks;  // ranks[j - 1] = Rk v^j
  std::size_t k0 = 0;
  std::size_t J = 0;
  bool stable = false;
  std::vector<RankCertificate> certificates;
  std::vector<RankLevel> history;  // one entry per truncation order tried

  std::size_t rank_at_k0() const { return ranks.at(k0 - 1); }
};

// Checks n = Rk v^1 <= ... <= N, strict growth up to k0, constancy after, and
// k0 <= d + 1; returns k0.
inline std::size_t validate_profile(const std::vector<std::size_t>& ranks, std::size_t N, std::size_t d) {
  const std::size_t n = N - d;
  if (ranks.empty()) throw PreconditionError("empty rank profile");
  if (ranks[0] != n) {
    throw InternalConsistencyError("Rk v^1 = " + std::to_string(ranks[0]) + " but n = " + std::to_string(n));
  }
  for (std::size_t j = 0; j < ranks.size(); ++j) {
    if (ranks[j] > N) throw InternalConsistencyError("Rk v^" + std::to_string(j + 1) + " exceeds N");
    if (j + 1 < ranks.size() && ranks[j + 1] < ranks[j]) {
      throw InternalConsistencyError("rank decreases from v^" + std::to_string(j + 1) + " to v^" + std::to_string(j + 2));
    }
  }
  std::size_t k0 = 0;
  for (std::size_t j = 0; j + 1 < ranks.size(); ++j) {
    if (ranks[j] == ranks[j + 1]) {
      k0 = j + 1;
      break;
    }
  }
  if (k0 == 0) throw InconclusiveError("rank profile has not stabilized within J = " + std::to_string(ranks.size()));
  for (std::size_t j = k0; j < ranks.size(); ++j) {
    if (ranks[j] != ranks[k0 - 1]) {
      throw InternalConsistencyError("rank grows again after stabilizing at k0 = " + std::to_string(k0));
    }
  }
  if (k0 > d + 1) throw InternalConsistencyError("k0 = " + std::to_string(k0) + " exceeds d + 1");
  return k0;
}

// Rk v^j for j = 1..J_max, escalating the truncation order to confirm the
// ranks; the last level's certified ranks are reported.
inline RankProfile rank_profile(const GenericManifold& m, std::size_t J_max, const RankOptions& opt = {}) {
  if (J_max < m.d() + 2) throw PreconditionError("rank_profile: J_max must be at least d + 2");
  RankProfile p;
  p.J = J_max;
  std::vector<RankCertificate> certs = segre_ranks(m, J_max, opt);
  auto ranks_of = [](const std::vector<RankCertificate>& cs) {
    std::vector<std::size_t> r;
    for (const auto& c : cs) r.push_back(c.rank);
    return r;
  };
  p.history.push_back({m.kappa, ranks_of(certs)});
  const bool at_cap = std::all_of(certs.begin(), certs.end(), [](const RankCertificate& c) { return c.stable; });
  bool unchanged = true;
  if (!at_cap) {
    for (int e = 1; e <= opt.escalations; ++e) {
      const GenericManifold higher = reload(m, m.kappa + e * opt.escalation_step);
      std::vector<RankCertificate> next = segre_ranks(higher, J_max, opt);
      p.history.push_back({higher.kappa, ranks_of(next)});
      const std::vector<std::size_t>& prev_ranks = p.history[p.history.size() - 2].ranks;
      for (std::size_t j = 0; j < J_max; ++j) {
        if (next[j].rank < prev_ranks[j]) {
          throw InternalConsistencyError("certified rank of v^" + std::to_string(j + 1) + " dropped under escalation");
        }
      }
      if (p.history.back().ranks != prev_ranks) unchanged = false;
      certs = std::move(next);
    }
  }
  p.stable = at_cap || (opt.escalations > 0 && unchanged);
  for (auto& c : certs) c.stable = c.stable || p.stable;
  p.certificates = std::move(certs);
  p.ranks = ranks_of(p.certificates);
  p.k0 = validate_profile(p.ranks, m.N(), m.d());
  return p;
}

}  // namespace segre
