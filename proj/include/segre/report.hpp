#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "segre/manifold.hpp"
#include "segre/orbit.hpp"
#include "segre/rank.hpp"
#include "segre/vector_fields.hpp"

namespace segre {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

inline Json exponent_json(const ExponentVector& e) {
  Json a = Json::array();
  for (std::size_t k = 0; k < e.arity(); ++k) a.push_back(e[k]);
  return a;
}

inline Json manifold_json_value(const GenericManifold& m, const std::string& name) {
  Json j;
  j["name"] = name;
  j["N"] = m.spec.N;
  j["d"] = m.spec.d;
  j["form"] = m.spec.form == ManifoldSpec::Form::graph ? "graph" : "rho";
  j["expressions"] = m.spec.expressions;
  if (m.spec.split) j["split"] = *m.spec.split;
  Json order = Json::array();
  for (std::size_t k : m.coordinate_order) order.push_back(k + 1);
  j["coordinate_order"] = order;
  return j;
}

inline Json config_json(const RunConfig& c, const GenericManifold& m) {
  Json j;
  j["kappa"] = c.kappa;
  j["jmax"] = c.resolved_jmax(m);
  j["depth"] = c.resolved_depth();
  j["degree"] = c.resolved_degree();
  j["seed"] = c.seed;
  j["escalations"] = c.escalations;
  return j;
}

inline Json report_header(const std::string& command, const GenericManifold& m, const std::string& name,
                          const RunConfig& c) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["manifold"] = manifold_json_value(m, name);
  j["config"] = config_json(c, m);
  return j;
}

inline Json certificate_json(const RankCertificate& c) {
  Json j;
  j["rank"] = c.rank;
  j["minor_rows"] = c.minor_rows;
  j["minor_cols"] = c.minor_cols;
  if (c.witness.kind == RankWitness::Kind::coefficient) {
    j["witness"] = {{"exponent", exponent_json(*c.witness.exponent)}, {"coefficient", c.witness.value.to_string()}};
  } else {
    j["witness"] = nullptr;
  }
  j["kappa_used"] = c.kappa_used;
  j["upper_checked"] = c.upper_checked;
  j["method"] = c.method;
  return j;
}

inline void add_profile(Json& j, const RankProfile& p) {
  j["ranks"] = p.ranks;
  j["k0"] = p.k0;
  j["stable"] = p.stable;
  Json certs = Json::array();
  for (const auto& c : p.certificates) certs.push_back(certificate_json(c));
  j["certificates"] = certs;
  Json hist = Json::array();
  for (const auto& h : p.history) hist.push_back({{"kappa", h.kappa}, {"ranks", h.ranks}});
  j["escalation_history"] = hist;
}

inline void add_lie(Json& j, const LieHullReport& lie) {
  j["dim_g0"] = lie.dim_g0;
  Json w = Json::array();
  for (const auto& b : lie.basis_witnesses) {
    Json v = Json::array();
    for (const auto& x : b.value) v.push_back(x.to_string());
    w.push_back({{"word", b.word}, {"value_at_0", v}});
  }
  j["lie_hull"] = {{"bracket_depth_used", lie.bracket_depth_used},
                   {"stable", lie.stable},
                   {"depth_truncated", lie.depth_truncated},
                   {"witnesses", w}};
}

inline Json generators_json(const std::vector<TruncatedSeries>& gens, const GenericManifold& m) {
  Json a = Json::array();
  for (const auto& f : gens) a.push_back(to_text(f, m.layout.z_block_names()));
  return a;
}

inline void add_checks(Json& j, const std::map<std::string, CheckResult>& checks) {
  Json c = Json::object();
  for (const auto& [name, r] : checks) c[name] = {{"pass", r.pass}, {"witness", r.witness}};
  j["checks"] = c;
}

inline Json verify_json(const VerifyReport& r, const GenericManifold& m, const std::string& name) {
  Json j = report_header("verify", m, name, r.config);
  add_profile(j, r.profile);
  add_lie(j, r.lie);
  j["e"] = r.orbit.e;
  j["finite_type"] = {{"lie", r.finite_type_lie}, {"segre", r.finite_type_segre}};
  j["orbit_generators"] = generators_json(r.orbit.f_generators, m);
  j["orbit_ideal"] = {{"kernel_size", r.ideal.kernel.size()},
                      {"linear_codim", r.ideal.linear_codim},
                      {"expected_codim", r.ideal.expected_codim}};
  Json gens = Json::array();
  for (const auto& g : r.mirror.artifact.generators) gens.push_back(to_text(g, BlockLayout{m.n()}.names(2 * r.mirror.k0)));
  j["mirror"] = {{"k0", r.mirror.k0}, {"dim", r.mirror.dim}, {"generators", gens},
                 {"annihilates", r.mirror.artifact.annihilates}, {"rank_along", r.mirror.artifact.rank_along},
                 {"literal_annihilates", r.mirror.literal.annihilates}};
  add_checks(j, r.checks);
  j["inconclusive"] = r.inconclusive;
  j["notes"] = r.notes;
  return j;
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

}  // namespace detail

// Fixed-width human rendering of a report.
inline std::string human_report(const Json& j) {
  std::ostringstream out;
  const Json& m = j.at("manifold");
  const Json& c = j.at("config");
  out << detail::pad("manifold", 16) << m.at("name").get<std::string>() << " (N=" << m.at("N") << ", d=" << m.at("d")
      << ", " << m.at("form").get<std::string>() << ")\n";
  out << detail::pad("kappa", 16) << c.at("kappa") << "\n";
  if (j.contains("ranks")) {
    std::string head = detail::pad("j", 16);
    std::string row = detail::pad("Rk v^j", 16);
    const auto& ranks = j.at("ranks");
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      head += detail::pad(std::to_string(k + 1), 4);
      row += detail::pad(ranks[k].dump(), 4);
    }
    out << head << "\n" << row << "\n";
    out << detail::pad("k0", 16) << j.at("k0") << "\n";
    out << detail::pad("stable", 16) << detail::scalar_text(j.at("stable")) << "\n";
  }
  if (j.contains("dim_g0")) out << detail::pad("dim g(0)", 16) << j.at("dim_g0") << "\n";
  if (j.contains("finite_type")) {
    out << detail::pad("finite type", 16) << "lie=" << detail::scalar_text(j.at("finite_type").at("lie"))
        << " segre=" << detail::scalar_text(j.at("finite_type").at("segre")) << "\n";
  }
  if (j.contains("e")) out << detail::pad("e", 16) << j.at("e") << "\n";
  if (j.contains("orbit_generators")) {
    std::size_t k = 1;
    for (const auto& g : j.at("orbit_generators")) {
      out << detail::pad("f" + std::to_string(k++), 16) << g.get<std::string>() << "\n";
    }
  }
  if (j.contains("checks")) {
    out << "\n" << detail::pad("check", 28) << detail::pad("result", 8) << "witness\n";
    for (const auto& [name, r] : j.at("checks").items()) {
      out << detail::pad(name, 28) << detail::pad(r.at("pass").get<bool>() ? "PASS" : "FAIL", 8)
          << r.at("witness").get<std::string>() << "\n";
    }
  }
  if (j.contains("inconclusive")) {
    for (const auto& s : j.at("inconclusive")) out << detail::pad("inconclusive", 16) << s.get<std::string>() << "\n";
  }
  if (j.contains("notes")) {
    for (const auto& [k, v] : j.at("notes").items()) out << detail::pad("note", 16) << k << ": " << detail::scalar_text(v) << "\n";
  }
  return out.str();
}

}  // namespace segre
