#include <gtest/gtest.h>

#include "segre/rank.hpp"
#include "segre/segre.hpp"
#include "support.hpp"

namespace segre {
namespace {

using testing::Dense;

// Series in the block variables t1..tj (n = 1).
TruncatedSeries T(std::size_t blocks, const std::string& text, int kappa = 8) {
  return parse_expression(text, VariableTable(BlockLayout{1}.names(blocks)), kappa);
}

FormalMap Tmap(std::size_t blocks, const std::vector<std::string>& comps, int kappa = 8) {
  std::vector<TruncatedSeries> c;
  for (const auto& s : comps) c.push_back(T(blocks, s, kappa));
  return {blocks, std::move(c)};
}

std::size_t dense_rank(const FormalMap& F) {
  std::vector<std::vector<Dense>> J(F.target_arity(), std::vector<Dense>(F.source_arity()));
  for (std::size_t i = 0; i < F.target_arity(); ++i) {
    for (std::size_t j = 0; j < F.source_arity(); ++j) J[i][j] = Dense::from_series(F[i]).derivative(j);
  }
  return testing::brute_force_rank(J, F.source_arity());
}

TEST(BlockLayout, IndicesAndNames) {
  const BlockLayout b{2};
  EXPECT_EQ(b.index(1, 0), 0u);
  EXPECT_EQ(b.index(3, 1), 5u);
  EXPECT_EQ(b.names(2), (std::vector<std::string>{"t1_1", "t1_2", "t2_1", "t2_2"}));
  EXPECT_EQ(BlockLayout{1}.names(3, "s"), (std::vector<std::string>{"s1", "s2", "s3"}));
}

TEST(Gamma, FixtureH) {
  const GenericManifold h = testing::load_fixture("h");
  const SegreMapping g = make_gamma(h);
  // variables: chi, tau, t
  const VariableTable vars(std::vector<std::string>{"c", "s", "t"});
  EXPECT_EQ(g.gamma.source_arity(), 3u);
  EXPECT_EQ(g.gamma[0], parse_expression("t", vars, 8));
  EXPECT_EQ(g.gamma[1], parse_expression("s + 2*i*t*c", vars, 8));
}

TEST(Gamma, FlatAndC2) {
  const VariableTable v2(std::vector<std::string>{"c", "s", "t"});
  const SegreMapping f = make_gamma(testing::load_fixture("flat"));
  EXPECT_EQ(f.gamma[1], parse_expression("s", v2, 8));
  const VariableTable v3(std::vector<std::string>{"c", "s1", "s2", "t"});
  const SegreMapping c = make_gamma(testing::load_fixture("c2"));
  ASSERT_EQ(c.gamma.target_arity(), 3u);
  EXPECT_EQ(c.gamma[1], parse_expression("s1 + 2*i*t*c", v3, 8));
  EXPECT_EQ(c.gamma[2], parse_expression("s2 + 2*i*t^2*c^2", v3, 8));
}

TEST(Iterates, FixtureH) {
  SegreChain chain(testing::load_fixture("h"));
  EXPECT_EQ(chain.v(1), Tmap(1, {"t1", "0"}));
  EXPECT_EQ(chain.v(2), Tmap(2, {"t2", "2*i*t1*t2"}));
  EXPECT_EQ(chain.v(3), Tmap(3, {"t3", "-2*i*t1*t2 + 2*i*t2*t3"}));
  EXPECT_EQ(chain.v(4), Tmap(4, {"t4", "2*i*(t1*t2 - t2*t3 + t3*t4)"}));
}

TEST(Iterates, FlatIsConstantInW) {
  SegreChain chain(testing::load_fixture("flat"));
  for (std::size_t j = 1; j <= 5; ++j) EXPECT_TRUE(chain.v(j)[1].is_zero());
}

TEST(Iterates, CapIsEnforced) {
  SegreChain chain(testing::load_fixture("h"));
  const std::size_t cap = default_variable_cap(1, 1);
  EXPECT_NO_THROW(chain.v(cap));
  EXPECT_THROW(chain.v(cap + 1), PreconditionError);
  EXPECT_THROW(chain.v(0), PreconditionError);
}

TEST(Iterates, IdentitiesOnFixtures) {
  for (const auto& name : testing::fixture_names()) {
    SegreChain chain(testing::load_fixture(name));
    for (std::size_t j = 1; j <= 4; ++j) {
      EXPECT_TRUE(check_z_part(chain, j).holds) << name << " " << j;
      EXPECT_TRUE(check_first_block_collapse(chain, j).holds) << name << " " << j;
      if (j >= 2) EXPECT_TRUE(check_return_collapse(chain, j).holds) << name << " " << j;
    }
  }
  SegreChain chain(testing::load_fixture("h"));
  EXPECT_THROW(check_return_collapse(chain, 1), PreconditionError);
}

TEST(SegreManifold, FixtureH) {
  const GenericManifold h = testing::load_fixture("h");
  SegreChain chain(h);
  const SegreManifoldParam s1 = make_T(chain, h, 1);
  EXPECT_EQ(s1.T, Tmap(1, {"t1", "0"}));
  EXPECT_EQ(s1.generators.size(), 1u);
  const SegreManifoldParam s2 = make_T(chain, h, 2);
  EXPECT_EQ(s2.T, Tmap(2, {"t2", "2*i*t1*t2", "t1", "0"}));
  EXPECT_EQ(s2.generators.size(), 2u);
  EXPECT_EQ(generic_rank(jacobian(s1.T)).rank, 1u);
  EXPECT_EQ(generic_rank(jacobian(s2.T)).rank, 2u);
  EXPECT_THROW(make_T(chain, h, 0), PreconditionError);
}

TEST(SegreManifold, ParametrizationSatisfiesGenerators) {
  for (const auto& name : testing::fixture_names()) {
    const GenericManifold m = testing::load_fixture(name);
    SegreChain chain(m);
    for (std::size_t k = 1; k <= 4; ++k) {
      const SegreManifoldParam s = make_T(chain, m, k);
      for (const auto& g : s.generators) EXPECT_TRUE(compose(g, s.T).is_zero()) << name << " k=" << k;
    }
  }
}

TEST(SegreManifold, C2ReachesFullRankAtThree) {
  const GenericManifold m = testing::load_fixture("c2");
  SegreChain chain(m);
  const FormalMap T3 = make_T(chain, m, 3).T;
  EXPECT_EQ(generic_rank(jacobian(T3)).rank, 3u);
  EXPECT_EQ(dense_rank(T3), 3u);
}

TEST(ThetaPhi, FixtureH) {
  const GenericManifold h = testing::load_fixture("h");
  SegreChain chain(h);
  EXPECT_EQ(make_theta(chain, 0), Tmap(1, {"t1", "0", "0", "0"}));
  EXPECT_EQ(make_phi(chain, 1), Tmap(1, {"0", "0", "t1", "0"}));
  EXPECT_EQ(make_phi(chain, 2), Tmap(2, {"t1", "0", "t2", "-2*i*t1*t2"}));
  const FormalMap theta1 = make_theta(chain, 1);
  EXPECT_EQ(theta1, Tmap(2, {"t2", "2*i*t1*t2", "t1", "0"}));
  EXPECT_EQ(generic_rank(jacobian(theta1)).rank, 2u);
  EXPECT_EQ(dense_rank(theta1), 2u);
  const ThetaPhi tp = make_theta_phi(chain, 0);
  EXPECT_FALSE(tp.phi.has_value());
  EXPECT_THROW(make_phi(chain, 0), PreconditionError);
}

TEST(ThetaPhi, MapIntoManifoldAndRestrict) {
  for (const auto& name : testing::fixture_names()) {
    const GenericManifold m = testing::load_fixture(name);
    SegreChain chain(m);
    for (std::size_t j = 0; j <= 4; ++j) {
      EXPECT_TRUE(check_maps_into_manifold(make_theta(chain, j), m, "theta").holds) << name << " " << j;
      if (j >= 1) {
        EXPECT_TRUE(check_maps_into_manifold(make_phi(chain, j), m, "phi").holds) << name << " " << j;
        EXPECT_TRUE(check_theta_restricts_to_phi(chain, j).holds) << name << " " << j;
      }
    }
  }
}

TEST(ThetaPhi, OffManifoldMapIsReported) {
  const GenericManifold h = testing::load_fixture("h");
  const IdentityCheck c = check_maps_into_manifold(Tmap(1, {"t1", "t1", "0", "0"}), h, "probe");
  EXPECT_FALSE(c.holds);
  EXPECT_NE(c.witness.find("probe"), std::string::npos);
}

class Pushforward : public ::testing::TestWithParam<int> {};

TEST_P(Pushforward, CrFieldsPushForward) {
  testing::Rng rng(1700 + GetParam());
  const std::string name = testing::fixture_names()[GetParam() % 4];
  const GenericManifold m = testing::load_fixture(name);
  SegreChain chain(m);
  const CrBasis basis = cr_basis(m);
  const TruncatedSeries f = rng.series(m.layout.arity(), 7, 6, 3);
  for (std::size_t j = 0; j <= 3; ++j) {
    const IdentityCheck c = check_pushforward(chain, basis, f, j);
    EXPECT_TRUE(c.holds) << name << " j=" << j << ": " << c.witness;
  }
}

INSTANTIATE_TEST_SUITE_P(Random, Pushforward, ::testing::Range(0, 12));

class RandomChains : public ::testing::TestWithParam<int> {};

TEST_P(RandomChains, IdentitiesHold) {
  testing::Rng rng(1800 + GetParam());
  const GenericManifold m = load_manifold(testing::random_rigid_spec(rng, 3, 1 + GetParam() % 2), 6);
  SegreChain chain(m);
  for (std::size_t j = 1; j <= 3; ++j) {
    EXPECT_TRUE(check_z_part(chain, j).holds);
    EXPECT_TRUE(check_first_block_collapse(chain, j).holds);
    if (j >= 2) EXPECT_TRUE(check_return_collapse(chain, j).holds);
    EXPECT_TRUE(check_theta_restricts_to_phi(chain, j).holds);
    EXPECT_TRUE(check_maps_into_manifold(make_phi(chain, j), m, "phi").holds);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, RandomChains, ::testing::Range(0, 10));

}  // namespace
}  // namespace segre
