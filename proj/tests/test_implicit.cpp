#include <gtest/gtest.h>

#include "segre/frontend.hpp"
#include "segre/implicit.hpp"
#include "support.hpp"

namespace segre {
namespace {

const AmbientLayout kL{2, 1};

TruncatedSeries G(const std::string& text, int kappa = 8) { return parse_expression(text, kL.graph_names(), kappa); }

FormalMap rho_of(const std::string& text, int kappa = 8) { return FormalMap(4, {G(text, kappa)}); }

TEST(SolveGraph, RhoFormOfH) {
  const GraphForm g = solve_graph(rho_of("-(i/2)*(w1 - ta1) - z1*ch1"), kL, 8);
  EXPECT_EQ(g.Q[0], G("ta1 + 2*i*z1*ch1"));
  EXPECT_EQ(g.Qbar[0], G("w1 - 2*i*z1*ch1"));
  EXPECT_EQ(g.valid_order, 8);
}

TEST(SolveGraph, AlreadySolved) {
  EXPECT_EQ(solve_graph(rho_of("-(i/2)*(w1 - ta1)"), kL, 8).Q[0], G("ta1"));
}

TEST(SolveGraph, GeometricSeries) {
  // w = tau + z chi w  =>  w = tau * sum_k (z chi)^k
  const int kappa = 9;
  const GraphForm g = solve_graph(rho_of("w1 - ta1 - z1*ch1*w1", kappa), kL, kappa);
  TruncatedSeries expected(4, kappa);
  TruncatedSeries power = TruncatedSeries::constant(4, kappa, 1);
  for (int k = 0; 2 * k + 1 <= kappa; ++k) {
    expected += G("ta1", kappa) * power;
    power *= G("z1*ch1", kappa);
  }
  EXPECT_EQ(g.Q[0], expected);
}

TEST(SolveGraph, SingularSplit) {
  EXPECT_THROW(solve_graph(rho_of("z1 - ch1"), kL, 6), PreconditionError);
}

TEST(CheckReality, Fixtures) {
  for (const auto& name : testing::fixture_names()) {
    const GenericManifold m = testing::load_fixture(name);
    EXPECT_TRUE(check_reality(m.graph, m.layout).holds) << name;
  }
}

TEST(CheckReality, WrongCoefficientHasWitness) {
  const GraphForm g = graph_from_Q(FormalMap(4, {G("ta1 + z1*ch1")}), kL);
  const RealityCheck r = check_reality(g, kL);
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, (ExponentVector{1, 0, 1, 0}));
}

TEST(IdealMember, Examples) {
  const GenericManifold h = testing::load_fixture("h");
  EXPECT_TRUE(ideal_member(h.rho[0], h));
  EXPECT_TRUE(ideal_member(sigma(h.rho[0], h.layout.split()), h));
  EXPECT_FALSE(ideal_member(G("z1"), h));
  EXPECT_TRUE(ideal_member(G("z1") * h.rho[0], h));
}

class RandomGeneric : public ::testing::TestWithParam<int> {};

// rho = A w + (random terms of degree >= 2), with A invertible.
FormalMap random_rho(testing::Rng& rng, const AmbientLayout& L, int kappa) {
  QiMatrix A = testing::random_invertible(rng, L.d);
  std::vector<TruncatedSeries> rho;
  for (std::size_t l = 0; l < L.d; ++l) {
    TruncatedSeries r = rng.series(L.arity(), kappa, 6, 3, 3, 2);
    for (std::size_t m = 0; m < L.d; ++m) r += TruncatedSeries::variable(L.arity(), kappa, L.w(m), A(l, m));
    for (std::size_t i = 0; i < L.n(); ++i) r += TruncatedSeries::variable(L.arity(), kappa, L.chi(i), rng.gaussian(2));
    rho.push_back(std::move(r));
  }
  return FormalMap(L.arity(), std::move(rho));
}

TEST_P(RandomGeneric, BackSubstitutionAnnihilatesRho) {
  testing::Rng rng(40 + GetParam());
  const AmbientLayout L{3, static_cast<std::size_t>(1 + GetParam() % 2)};
  const int kappa = 6;
  const FormalMap rho = random_rho(rng, L, kappa);
  const GraphForm g = solve_graph(rho, L, kappa);
  for (std::size_t l = 0; l < L.d; ++l) {
    EXPECT_TRUE(compose(rho[l], detail::replace_w(g.Q, L, kappa)).is_zero());
    for (const auto& t : g.Q[l].terms()) {
      for (std::size_t m = 0; m < L.d; ++m) EXPECT_EQ(t.exponent[L.w(m)], 0u);
    }
  }
}

TEST_P(RandomGeneric, IndependentSolversAgree) {
  testing::Rng rng(80 + GetParam());
  const AmbientLayout L{3, static_cast<std::size_t>(1 + GetParam() % 2)};
  const FormalMap rho = random_rho(rng, L, 6);
  const GraphForm a = solve_graph(rho, L, 6);
  const GraphForm b = solve_graph_fixed_point(rho, L, 6);
  EXPECT_EQ(a.Q, b.Q);
  EXPECT_EQ(a.Qbar, b.Qbar);
}

TEST_P(RandomGeneric, SigmaOfRhoInIdealForRealManifolds) {
  testing::Rng rng(120 + GetParam());
  const GenericManifold base = load_manifold(testing::random_rigid_spec(rng, 3, 1 + GetParam() % 2), 6);
  const GenericManifold m = load_manifold(testing::linear_change(base, testing::random_invertible(rng, 3)), 6);
  for (std::size_t l = 0; l < m.d(); ++l) {
    EXPECT_TRUE(ideal_member(m.rho[l], m));
    EXPECT_TRUE(ideal_member(sigma(m.rho[l], m.layout.split()), m));
  }
  EXPECT_TRUE(check_reality(m.graph, m.layout).holds);
}

INSTANTIATE_TEST_SUITE_P(Random, RandomGeneric, ::testing::Range(0, 12));

}  // namespace
}  // namespace segre
