// segre: iterated Segre mappings, generic ranks and orbit data of formal
// generic submanifolds.
//
// Exit codes: 0 success, 2 parse/load, 3 inconclusive, 4 theorem-check
// failure, 5 internal consistency.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "segre/frontend.hpp"
#include "segre/orbit.hpp"
#include "segre/rank.hpp"
#include "segre/report.hpp"
#include "segre/vector_fields.hpp"

namespace {

enum ExitCode { kOk = 0, kLoad = 2, kInconclusive = 3, kCheckFailed = 4, kInternal = 5 };

struct Options {
  segre::RunConfig cfg;
  std::string file;
  std::string fixture;
  bool json = false;
};

struct Loaded {
  segre::GenericManifold m;
  std::string name;
};

Loaded load(const Options& o) {
  if (o.file.empty() == o.fixture.empty()) {
    throw segre::PreconditionError("give exactly one of a manifold file or --fixture <name>");
  }
  if (!o.fixture.empty()) return {segre::load_manifold(segre::fixture(o.fixture), o.cfg.kappa), o.fixture};
  return {segre::load_manifold(segre::read_manifold_file(o.file), o.cfg.kappa), o.file};
}

void emit(const Options& o, const segre::Json& j) {
  if (o.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << segre::human_report(j);
  }
}

int cmd_rank(const Options& o) {
  const Loaded L = load(o);
  const segre::RankProfile p = segre::rank_profile(L.m, o.cfg.resolved_jmax(L.m), o.cfg.rank_options());
  segre::Json j = segre::report_header("rank", L.m, L.name, o.cfg);
  segre::add_profile(j, p);
  emit(o, j);
  return p.stable ? kOk : kInconclusive;
}

int cmd_finite_type(const Options& o) {
  const Loaded L = load(o);
  const segre::RankProfile p = segre::rank_profile(L.m, o.cfg.resolved_jmax(L.m), o.cfg.rank_options());
  const segre::LieHullReport lie = segre::lie_hull_dimension(L.m, o.cfg.resolved_depth());
  const bool by_lie = lie.dim_g0 == 2 * L.m.N() - L.m.d();
  const bool by_segre = p.rank_at_k0() == L.m.N();
  segre::Json j = segre::report_header("finite-type", L.m, L.name, o.cfg);
  segre::add_profile(j, p);
  segre::add_lie(j, lie);
  j["finite_type"] = {{"lie", by_lie}, {"segre", by_segre}};
  std::map<std::string, segre::CheckResult> checks;
  checks["finite_type_agreement"] = {by_lie == by_segre, std::string("lie: ") + (by_lie ? "true" : "false") +
                                                             ", segre: " + (by_segre ? "true" : "false")};
  const long rhs = static_cast<long>(lie.dim_g0) + static_cast<long>(L.m.d()) - static_cast<long>(L.m.N());
  checks["central_identity"] = {static_cast<long>(p.rank_at_k0()) == rhs,
                                "Rk v^k0 = " + std::to_string(p.rank_at_k0()) + ", dim g(0) + d - N = " +
                                    std::to_string(rhs)};
  segre::add_checks(j, checks);
  emit(o, j);
  for (const auto& [name, c] : checks) {
    if (!c.pass) return kCheckFailed;
  }
  return p.stable && lie.stable ? kOk : kInconclusive;
}

int cmd_orbit(const Options& o) {
  const Loaded L = load(o);
  const segre::RankProfile p = segre::rank_profile(L.m, o.cfg.resolved_jmax(L.m), o.cfg.rank_options());
  const segre::LieHullReport lie = segre::lie_hull_dimension(L.m, o.cfg.resolved_depth());
  int D = o.cfg.resolved_degree();
  segre::GenericManifold m = L.m;
  segre::OrbitReport orbit = segre::orbit_annihilator(m, p, D, lie.dim_g0);
  if (orbit.inconclusive) {
    ++D;
    if (2 * D > m.kappa) m = segre::reload(L.m, 2 * D);
    orbit = segre::orbit_annihilator(m, p, D, lie.dim_g0);
  }
  segre::Json j = segre::report_header("orbit", L.m, L.name, o.cfg);
  segre::add_profile(j, p);
  j["dim_g0"] = lie.dim_g0;
  j["e"] = orbit.e;
  j["orbit_generators"] = segre::generators_json(orbit.f_generators, L.m);
  segre::add_checks(j, orbit.checks);
  if (orbit.inconclusive) {
    j["inconclusive"] = {"degree bound " + std::to_string(D) +
                         " insufficient: annihilator e = " + std::to_string(orbit.e) +
                         ", N - Rk v^k0 = " + std::to_string(orbit.e_segre) + "; retry with larger --degree and --kappa"};
  }
  emit(o, j);
  if (orbit.inconclusive) return kInconclusive;
  for (const auto& [name, c] : orbit.checks) {
    if (!c.pass) return kCheckFailed;
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  const Loaded L = load(o);
  const segre::VerifyReport r = segre::verify_all(L.m, o.cfg);
  emit(o, segre::verify_json(r, L.m, L.name));
  if (!r.all_pass()) return kCheckFailed;
  return r.inconclusive.empty() ? kOk : kInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated Segre mappings and CR orbits of formal generic submanifolds"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = segre::kDefaultSeed;
  std::size_t jmax = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("manifold", o.file, "manifold JSON file");
    sub->add_option("--fixture", o.fixture, "built-in fixture: h, flat, l4, c2");
    sub->add_option("--kappa", o.cfg.kappa, "truncation order")->check(CLI::Range(2, 64));
    sub->add_option("--jmax", jmax, "largest j for Rk v^j (default d + 2)");
    sub->add_option("--depth", o.cfg.depth, "maximal bracket length (default kappa)")->check(CLI::NonNegativeNumber);
    sub->add_option("--degree", o.cfg.degree, "degree bound for orbit annihilators")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "random screening seed (SEGRE_SEED overrides)");
    sub->add_option("--jobs", o.cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--escalations", o.cfg.escalations, "truncation escalations confirming ranks")
        ->check(CLI::Range(0, 4));
    sub->add_flag("--json", o.json, "emit the JSON report");
  };
  CLI::App* rank = app.add_subcommand("rank", "Rk v^1..Rk v^J and k0");
  CLI::App* ft = app.add_subcommand("finite-type", "finite type by the Lie and Segre routes");
  CLI::App* orbit = app.add_subcommand("orbit", "orbit annihilator generators f_1..f_e");
  CLI::App* verify = app.add_subcommand("verify", "full theorem report");
  for (CLI::App* s : {rank, ft, orbit, verify}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kLoad;
  }
  if (const char* env = std::getenv("SEGRE_SEED")) {
    try {
      seed = std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      std::cerr << "error: SEGRE_SEED is not an integer\n";
      return kLoad;
    }
  }
  o.cfg.seed = seed;
  o.cfg.jmax = jmax;

  try {
    if (*rank) return cmd_rank(o);
    if (*ft) return cmd_finite_type(o);
    if (*orbit) return cmd_orbit(o);
    return cmd_verify(o);
  } catch (const segre::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kLoad;
  } catch (const segre::LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return kLoad;
  } catch (const segre::InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const segre::InternalConsistencyError& e) {
    std::cerr << "internal consistency error: " << e.what() << "\n";
    return kInternal;
  } catch (const segre::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLoad;
  }
}
