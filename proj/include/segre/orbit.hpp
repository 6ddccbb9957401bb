#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "segre/errors.hpp"
#include "segre/frontend.hpp"
#include "segre/implicit.hpp"
#include "segre/linalg.hpp"
#include "segre/manifold.hpp"
#include "segre/rank.hpp"
#include "segre/segre.hpp"
#include "segre/series.hpp"
#include "segre/vector_fields.hpp"

namespace segre {

struct CheckResult {
  bool pass = false;
  std::string witness;
};

// All exponents of total degree 1..D in `arity` variables, graded-lex.
inline std::vector<ExponentVector> monomials_up_to(std::size_t arity, int D) {
  std::vector<ExponentVector> out;
  std::vector<unsigned> e(arity, 0);
  auto rec = [&](auto&& self, std::size_t var, unsigned left) -> void {
    if (var + 1 == arity) {
      e[var] = left;
      ExponentVector v(arity);
      for (std::size_t k = 0; k < arity; ++k) v.set(k, e[k]);
      out.push_back(v);
      return;
    }
    for (unsigned a = left + 1; a-- > 0;) {
      e[var] = a;
      self(self, var + 1, left - a);
    }
  };
  for (int deg = 1; deg <= D; ++deg) rec(rec, 0, static_cast<unsigned>(deg));
  std::stable_sort(out.begin(), out.end(), [](const ExponentVector& a, const ExponentVector& b) {
    return graded_lex_less(a, b);
  });
  return out;
}

// Polynomials f of degree 1..D with f o G = 0 modulo degree > kappa(G),
// as reduced row echelon rows over the graded-lex monomial basis.
struct Annihilator {
  std::size_t arity = 0;
  int kappa = 0;
  std::vector<ExponentVector> monomials;
  std::vector<std::vector<GaussianRational>> rows;
  std::vector<std::size_t> pivots;

  std::size_t linear_count() const {
    return static_cast<std::size_t>(std::count_if(monomials.begin(), monomials.end(),
                                                  [](const ExponentVector& e) { return e.total_degree() == 1; }));
  }

  TruncatedSeries series(std::size_t r) const {
    std::vector<Term> terms;
    for (std::size_t c = 0; c < monomials.size(); ++c) {
      if (!rows[r][c].is_zero()) terms.push_back({monomials[c], rows[r][c]});
    }
    return TruncatedSeries::from_terms(arity, kappa, std::move(terms));
  }

  // Rows whose pivot is a linear monomial; their linear parts are independent.
  std::vector<std::size_t> linear_rows() const {
    std::vector<std::size_t> out;
    const std::size_t lin = linear_count();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (pivots[r] < lin) out.push_back(r);
    }
    return out;
  }
};

inline Annihilator annihilator(const FormalMap& G, int D) {
  Annihilator a;
  a.arity = G.target_arity();
  a.kappa = G.kappa();
  a.monomials = monomials_up_to(a.arity, D);
  std::unordered_map<ExponentVector, std::size_t, ExponentHash> row_of;
  std::vector<TruncatedSeries> images;
  for (const auto& e : a.monomials) {
    images.push_back(compose(TruncatedSeries::from_terms(a.arity, a.kappa, {{e, 1}}), G));
    for (const auto& t : images.back().terms()) row_of.try_emplace(t.exponent, row_of.size());
  }
  QiMatrix A(row_of.size(), a.monomials.size());
  for (std::size_t c = 0; c < images.size(); ++c) {
    for (const auto& t : images[c].terms()) A(row_of.at(t.exponent), c) = t.coeff;
  }
  const auto basis = kernel(A);
  if (basis.empty()) return a;
  QiMatrix K(basis.size(), a.monomials.size());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    for (std::size_t c = 0; c < a.monomials.size(); ++c) K(r, c) = basis[r][c];
  }
  const Echelon e = rref(K);
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) {
    a.rows.push_back(e.reduced.row(r));
    a.pivots.push_back(e.pivot_cols[r]);
  }
  return a;
}

// Linear part of f as a coefficient vector of length f.arity().
inline std::vector<GaussianRational> linear_part(const TruncatedSeries& f) {
  std::vector<GaussianRational> v(f.arity());
  for (std::size_t k = 0; k < f.arity(); ++k) v[k] = f.coefficient(ExponentVector::unit(f.arity(), k));
  return v;
}

inline std::size_t rank_of_rows(const std::vector<std::vector<GaussianRational>>& rows, std::size_t width) {
  if (rows.empty()) return 0;
  QiMatrix M(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) M(r, c) = rows[r][c];
  }
  return rank(M);
}

inline std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

struct OrbitReport {
  int degree_bound = 0;
  std::size_t e = 0;        // rank of the linear parts of the annihilator
  std::size_t e_segre = 0;  // N - Rk v^{k0}
  std::optional<std::size_t> e_lie;
  std::optional<std::size_t> dim_O;
  std::vector<TruncatedSeries> f_generators;  // series in Z only
  std::map<std::string, CheckResult> checks;
  bool inconclusive = false;
};

// Generators f_1..f_e of the Z-only functions vanishing on every Segre
// image, found as the annihilator of v^{k0} among polynomials of degree <= D.
inline OrbitReport orbit_annihilator(const GenericManifold& m, const RankProfile& profile, int D,
                                     std::optional<std::size_t> dim_g0 = std::nullopt,
                                     SegreChain* shared_chain = nullptr) {
  if (D < 1 || 2 * D > m.kappa) throw PreconditionError("orbit_annihilator: need 1 <= D <= kappa / 2");
  std::optional<SegreChain> own;
  SegreChain& chain = shared_chain ? *shared_chain : own.emplace(m);
  const std::size_t N = m.N();
  const std::size_t k0 = profile.k0;

  OrbitReport r;
  r.degree_bound = D;
  r.e_segre = N - profile.rank_at_k0();
  if (dim_g0) {
    r.dim_O = *dim_g0;
    r.e_lie = 2 * N - m.d() - *dim_g0;
  }
  const Annihilator ann = annihilator(chain.v(k0), D);
  for (std::size_t row : ann.linear_rows()) r.f_generators.push_back(ann.series(row));
  r.e = r.f_generators.size();
  r.inconclusive = r.e != r.e_segre;

  const std::string sides = "annihilator e = " + std::to_string(r.e) + ", N - Rk v^k0 = " + std::to_string(r.e_segre) +
                            (r.e_lie ? ", 2N - d - dim g(0) = " + std::to_string(*r.e_lie) : std::string());
  r.checks["orbit_codimension"] = {r.e == r.e_segre && (!r.e_lie || *r.e_lie == r.e), sides};

  // f_k o v^j = 0 for j <= 2 k0.
  CheckResult annihilates{true, "f_k o v^j = 0 for j = 1.." + std::to_string(2 * k0)};
  for (std::size_t k = 0; k < r.f_generators.size() && annihilates.pass; ++k) {
    for (std::size_t j = 1; j <= 2 * k0; ++j) {
      const TruncatedSeries img = compose(r.f_generators[k], chain.v(j));
      if (!img.is_zero()) {
        annihilates = {false, "f_" + std::to_string(k + 1) + " o v^" + std::to_string(j) + " = " + to_text(img, chain.blocks().names(j))};
        break;
      }
    }
  }
  r.checks["orbit_annihilates_segre"] = annihilates;

  // df_k(0) together with d rho(0) have rank d + e.
  std::vector<std::vector<GaussianRational>> lin;
  for (const auto& f : r.f_generators) {
    std::vector<GaussianRational> v = linear_part(f);
    v.resize(2 * N);
    lin.push_back(std::move(v));
  }
  for (const auto& rho : m.rho.components()) lin.push_back(linear_part(rho));
  const std::size_t lr = rank_of_rows(lin, 2 * N);
  r.checks["orbit_independence"] = {lr == m.d() + r.e, "rank of df(0), d rho(0) = " + std::to_string(lr) +
                                                           ", d + e = " + std::to_string(m.d() + r.e)};
  return r;
}

struct OrbitIdealReport {
  std::vector<TruncatedSeries> kernel;  // series in (Z, zeta)
  std::size_t linear_codim = 0;
  std::size_t expected_codim = 0;
  std::size_t rank_theta = 0;
  std::size_t rank_phi = 0;
  std::map<std::string, CheckResult> checks;
  bool inconclusive = false;
};

// Annihilator of Phi^{k0+1} among polynomials in (Z, zeta) of degree <= D.
inline OrbitIdealReport orbit_ideal_in_M(const GenericManifold& m, std::size_t k0, int D,
                                         const std::vector<TruncatedSeries>& f_generators,
                                         std::optional<std::size_t> dim_g0, const RankOptions& opt,
                                         SegreChain* shared_chain = nullptr) {
  if (D < 1 || 2 * D > m.kappa) throw PreconditionError("orbit_ideal_in_M: need 1 <= D <= kappa / 2");
  std::optional<SegreChain> own;
  SegreChain& chain = shared_chain ? *shared_chain : own.emplace(m);
  const std::size_t N = m.N();
  const FormalMap phi = make_phi(chain, k0 + 1);
  const FormalMap theta = make_theta(chain, k0 + 1);

  OrbitIdealReport r;
  r.expected_codim = m.d() + f_generators.size();
  const Annihilator ann = annihilator(phi, D);
  for (std::size_t row = 0; row < ann.rows.size(); ++row) r.kernel.push_back(ann.series(row));
  r.linear_codim = ann.linear_rows().size();
  r.inconclusive = r.linear_codim != r.expected_codim;

  CheckResult gens{true, "rho_j and f_k vanish on Phi^" + std::to_string(k0 + 1)};
  for (std::size_t l = 0; l < m.d() && gens.pass; ++l) {
    const TruncatedSeries img = compose(m.rho[l], phi);
    if (!img.is_zero()) gens = {false, "rho_" + std::to_string(l + 1) + " o Phi = " + to_text(img)};
  }
  std::vector<std::optional<std::size_t>> z_only(N);
  for (std::size_t k = 0; k < N; ++k) z_only[k] = k;
  for (std::size_t k = 0; k < f_generators.size() && gens.pass; ++k) {
    const TruncatedSeries f = relabel(f_generators[k], 2 * N, z_only);
    const TruncatedSeries img = compose(f, phi);
    if (!img.is_zero()) gens = {false, "f_" + std::to_string(k + 1) + " o Phi = " + to_text(img)};
  }
  if (gens.pass && r.inconclusive) {
    gens = {false, "linear codimension " + std::to_string(r.linear_codim) + " != d + e = " +
                       std::to_string(r.expected_codim)};
  }
  r.checks["orbit_ideal_generators"] = gens;

  CheckResult real{true, "sigma maps the kernel (" + std::to_string(r.kernel.size()) + " elements) into itself"};
  for (std::size_t k = 0; k < r.kernel.size(); ++k) {
    const TruncatedSeries img = compose(sigma(r.kernel[k], m.layout.split()), phi);
    if (!img.is_zero()) {
      real = {false, "sigma(" + to_text(r.kernel[k], m.layout.rho_names()) + ") o Phi = " + to_text(img)};
      break;
    }
  }
  r.checks["orbit_ideal_reality"] = real;

  r.rank_theta = generic_rank(jacobian(theta), opt, 1001).rank;
  r.rank_phi = generic_rank(jacobian(phi), opt, 1002).rank;
  const bool ranks_ok = r.rank_theta == r.rank_phi && (!dim_g0 || r.rank_phi == *dim_g0);
  r.checks["orbit_rank"] = {ranks_ok, "Rk Theta^" + std::to_string(k0 + 1) + " = " + std::to_string(r.rank_theta) +
                                          ", Rk Phi^" + std::to_string(k0 + 1) + " = " + std::to_string(r.rank_phi) +
                                          (dim_g0 ? ", dim g(0) = " + std::to_string(*dim_g0) : std::string())};
  return r;
}

struct MirrorPattern {
  std::vector<TruncatedSeries> generators;  // linear forms in 2 k0 n variables
  FormalMap F;                              // k0 n variables -> 2 k0 n variables
  bool annihilates = false;                 // v^{2k0} o F = 0
  std::size_t rank_along = 0;
  std::string witness;
};

struct MirrorManifold {
  std::size_t k0 = 0;
  std::size_t dim = 0;
  MirrorPattern artifact;  // t^{2k0} = 0, t^{2k0-1-j} = t^{1+j}
  MirrorPattern literal;   // t^1 = 0, t^{2k0-j} = t^{2+j}
};

namespace detail {

// source_block[b] (1-based target block b) names the s-block feeding t^b,
// or 0 for the zero block.
inline MirrorPattern mirror_pattern(SegreChain& chain, std::size_t k0, const std::vector<std::size_t>& source_block,
                                    const RankOptions& opt, std::uint64_t salt) {
  const std::size_t n = chain.n();
  const BlockLayout B = chain.blocks();
  const std::size_t J = 2 * k0;
  const FormalMap& v = chain.v(J);
  const int kappa = v.kappa();
  MirrorPattern p;
  std::vector<TruncatedSeries> comps;
  for (std::size_t b = 1; b <= J; ++b) {
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t s = source_block[b];
      comps.push_back(s == 0 ? TruncatedSeries(k0 * n, kappa)
                             : TruncatedSeries::variable(k0 * n, kappa, B.index(s, l)));
    }
  }
  p.F = FormalMap(k0 * n, std::move(comps));
  // Ideal generators: t^b for zero blocks, t^b - t^c for repeated sources.
  std::map<std::size_t, std::size_t> first_target;
  for (std::size_t b = 1; b <= J; ++b) {
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t s = source_block[b];
      TruncatedSeries t = TruncatedSeries::variable(J * n, kappa, B.index(b, l));
      if (s == 0) {
        p.generators.push_back(std::move(t));
      } else if (auto it = first_target.find(s); it != first_target.end() && it->second != b) {
        p.generators.push_back(t - TruncatedSeries::variable(J * n, kappa, B.index(it->second, l)));
      }
    }
    if (source_block[b] != 0) first_target.try_emplace(source_block[b], b);
  }
  const FormalMap image = compose(v, p.F);
  p.annihilates = true;
  for (std::size_t c = 0; c < image.target_arity(); ++c) {
    if (!image[c].is_zero()) {
      p.annihilates = false;
      p.witness = "component " + std::to_string(c + 1) + " of v^" + std::to_string(J) + " o F = " + to_text(image[c], B.names(k0, "s"));
      break;
    }
  }
  p.rank_along = rank_along(v, p.F, opt, salt).rank;
  return p;
}

}  // namespace detail

// Sigma in C^{2 k0 n} with v^{2k0}(Sigma) = {0}, in both index conventions.
inline MirrorManifold mirror_sigma(SegreChain& chain, std::size_t k0, const RankOptions& opt = {}) {
  if (k0 < 1) throw PreconditionError("mirror_sigma: k0 must be >= 1");
  const std::size_t J = 2 * k0;
  MirrorManifold out;
  out.k0 = k0;
  out.dim = k0 * chain.n();

  std::vector<std::size_t> art(J + 1, 0);
  for (std::size_t b = 1; b <= k0; ++b) art[b] = b;
  for (std::size_t j = 0; j + 2 <= k0; ++j) art[J - 1 - j] = 1 + j;
  out.artifact = detail::mirror_pattern(chain, k0, art, opt, 2001);

  std::vector<std::size_t> lit(J + 1, 0);
  for (std::size_t b = 2; b <= k0 + 1; ++b) lit[b] = b - 1;
  for (std::size_t j = 0; j + 2 <= k0; ++j) lit[J - j] = 1 + j;
  out.literal = detail::mirror_pattern(chain, k0, lit, opt, 2002);

  if (!out.artifact.annihilates && !out.literal.annihilates) {
    throw InternalConsistencyError("neither mirror pattern is mapped to 0 by v^" + std::to_string(J) + ": " +
                                   out.artifact.witness);
  }
  return out;
}

struct RunConfig {
  int kappa = 8;
  std::size_t jmax = 0;  // 0: d + 2
  int depth = 0;         // 0: kappa
  int degree = 0;        // 0: min(4, kappa / 2)
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  int escalations = 2;

  std::size_t resolved_jmax(const GenericManifold& m) const { return jmax ? jmax : m.d() + 2; }
  int resolved_depth() const { return depth ? depth : kappa; }
  int resolved_degree() const { return degree ? degree : std::min(4, kappa / 2); }
  RankOptions rank_options() const {
    RankOptions o;
    o.seed = seed;
    o.jobs = jobs;
    o.escalations = escalations;
    return o;
  }
};

struct VerifyReport {
  RunConfig config;
  RankProfile profile;
  LieHullReport lie;
  OrbitReport orbit;
  OrbitIdealReport ideal;
  MirrorManifold mirror;
  bool finite_type_lie = false;
  bool finite_type_segre = false;
  std::map<std::string, CheckResult> checks;
  std::vector<std::string> inconclusive;
  std::map<std::string, std::string> notes;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second.pass; });
  }
};

inline CheckResult check_collapse(SegreChain& chain, std::size_t up_to) {
  for (std::size_t j = 1; j <= up_to; ++j) {
    if (auto c = check_z_part(chain, j); !c.holds) return {false, c.witness};
    if (j + 1 <= up_to) {
      if (auto c = check_first_block_collapse(chain, j); !c.holds) return {false, c.witness};
    }
    if (j >= 2 && j + 1 <= up_to) {
      if (auto c = check_return_collapse(chain, j); !c.holds) return {false, c.witness};
    }
  }
  return {true, "v^1..v^" + std::to_string(up_to)};
}

// Theta^j, Phi^j map into M and Rk Theta^j = Rk v^j + n, Rk Phi^j = Rk v^{j-1} + n
// for 1 <= j <= up_to.
inline std::pair<CheckResult, CheckResult> check_theta_phi(SegreChain& chain, const GenericManifold& m,
                                                           std::size_t up_to, const RankOptions& opt) {
  CheckResult into{true, "rho o Theta^j = rho o Phi^j = 0, Theta^j(.., 0) = Phi^j for j = 1.." + std::to_string(up_to)};
  CheckResult ranks{true, ""};
  auto rk_v = [&](std::size_t j) -> std::size_t {
    return j == 0 ? 0 : generic_rank(jacobian(chain.v(j)), opt, 3000 + j).rank;
  };
  for (std::size_t j = 1; j <= up_to; ++j) {
    const FormalMap theta = make_theta(chain, j);
    const FormalMap phi = make_phi(chain, j);
    if (into.pass) {
      if (auto c = check_maps_into_manifold(theta, m, "Theta^" + std::to_string(j)); !c.holds) {
        into = {false, c.witness};
      } else if (auto c2 = check_maps_into_manifold(phi, m, "Phi^" + std::to_string(j)); !c2.holds) {
        into = {false, c2.witness};
      } else if (auto c3 = check_theta_restricts_to_phi(chain, j); !c3.holds) {
        into = {false, c3.witness};
      }
    }
    const std::size_t rt = generic_rank(jacobian(theta), opt, 4000 + j).rank;
    const std::size_t rp = generic_rank(jacobian(phi), opt, 5000 + j).rank;
    const std::size_t vj = rk_v(j);
    const std::size_t vjm = rk_v(j - 1);
    const bool ok = rt == vj + chain.n() && rp == vjm + chain.n();
    if (!ranks.witness.empty()) ranks.witness += "; ";
    ranks.witness += "j=" + std::to_string(j) + ": Rk Theta=" + std::to_string(rt) + " Rk v^j+n=" +
                     std::to_string(vj + chain.n()) + " Rk Phi=" + std::to_string(rp) +
                     " Rk v^{j-1}+n=" + std::to_string(vjm + chain.n());
    if (!ok) ranks.pass = false;
  }
  return {into, ranks};
}

// Runs the whole theorem suite on one manifold.
inline VerifyReport verify_all(const GenericManifold& input, const RunConfig& cfg) {
  VerifyReport rep;
  rep.config = cfg;
  const RankOptions opt = cfg.rank_options();
  const std::size_t N = input.N();
  const std::size_t d = input.d();

  rep.checks["reality"] = [&] {
    const RealityCheck rc = check_reality(input.graph, input.layout);
    return CheckResult{rc.holds, rc.holds ? "Q(z,chi,Qbar(chi,z,w)) = w" : rc.witness_text};
  }();

  rep.profile = rank_profile(input, cfg.resolved_jmax(input), opt);
  if (!rep.profile.stable) rep.inconclusive.push_back("rank profile not stable under truncation escalation");
  const std::size_t k0 = rep.profile.k0;
  const std::size_t rk0 = rep.profile.rank_at_k0();
  rep.checks["rank_increasing"] = {true, "ranks " + join_sizes(rep.profile.ranks) + ", k0 = " + std::to_string(k0)};
  rep.checks["k0_bound"] = {k0 >= 1 && k0 <= d + 1, "k0 = " + std::to_string(k0) + ", d + 1 = " + std::to_string(d + 1)};

  rep.lie = lie_hull_dimension(input, cfg.resolved_depth());
  if (!rep.lie.stable) rep.inconclusive.push_back("Lie hull dimension not stable at the requested depth");
  const std::size_t g0 = rep.lie.dim_g0;
  rep.finite_type_lie = g0 == 2 * N - d;
  rep.finite_type_segre = rk0 == N;
  rep.checks["finite_type_agreement"] = {rep.finite_type_lie == rep.finite_type_segre,
                                         std::string("lie: ") + (rep.finite_type_lie ? "true" : "false") +
                                             ", segre: " + (rep.finite_type_segre ? "true" : "false")};
  const long lhs = static_cast<long>(rk0);
  const long rhs = static_cast<long>(g0) + static_cast<long>(d) - static_cast<long>(N);
  rep.checks["central_identity"] = {lhs == rhs, "Rk v^k0 = " + std::to_string(lhs) +
                                                    ", dim g(0) + d - N = " + std::to_string(rhs)};

  // Orbit data, with one escalation of the degree bound on inconclusive results.
  GenericManifold m = input;
  int D = cfg.resolved_degree();
  std::optional<SegreChain> chain;
  chain.emplace(m);
  rep.orbit = orbit_annihilator(m, rep.profile, D, g0, &*chain);
  rep.ideal = orbit_ideal_in_M(m, k0, D, rep.orbit.f_generators, g0, opt, &*chain);
  if (rep.orbit.inconclusive || rep.ideal.inconclusive) {
    ++D;
    if (2 * D > m.kappa) {
      m = reload(input, 2 * D);
      chain.emplace(m);
    }
    rep.orbit = orbit_annihilator(m, rep.profile, D, g0, &*chain);
    rep.ideal = orbit_ideal_in_M(m, k0, D, rep.orbit.f_generators, g0, opt, &*chain);
    rep.notes["degree_bound_escalated"] = std::to_string(D);
  }
  if (rep.orbit.inconclusive) rep.inconclusive.push_back("orbit annihilator inconclusive at degree bound " + std::to_string(D));
  if (rep.ideal.inconclusive) rep.inconclusive.push_back("orbit ideal codimension inconclusive at degree bound " + std::to_string(D));
  for (const auto& [name, c] : rep.orbit.checks) rep.checks[name] = c;
  for (const auto& [name, c] : rep.ideal.checks) rep.checks[name] = c;

  SegreChain& ch = *chain;
  rep.checks["collapse_identities"] = check_collapse(ch, 2 * k0);
  auto [into, ranks] = check_theta_phi(ch, m, k0 + 1, opt);
  rep.checks["theta_phi_membership"] = into;
  rep.checks["theta_phi_rank"] = ranks;

  rep.mirror = mirror_sigma(ch, k0, opt);
  const MirrorPattern& a = rep.mirror.artifact;
  rep.checks["mirror_double"] = {a.annihilates && a.rank_along == rk0,
                                 a.annihilates ? "v^" + std::to_string(2 * k0) + " o F = 0, rank along F = " +
                                                     std::to_string(a.rank_along) + ", Rk v^k0 = " + std::to_string(rk0)
                                               : a.witness};
  rep.notes["mirror_literal_pattern"] =
      rep.mirror.literal.annihilates ? "annihilated by v^2k0" : "not annihilated: " + rep.mirror.literal.witness;
  if (rep.lie.depth_truncated) rep.notes["lie_depth_truncated"] = "true";
  return rep;
}

}  // namespace segre
