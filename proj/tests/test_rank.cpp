#include <gtest/gtest.h>

#include "segre/rank.hpp"
#include "segre/segre.hpp"
#include "support.hpp"

namespace segre {
namespace {

using testing::Dense;

TruncatedSeries T(std::size_t blocks, const std::string& text, int kappa = 8) {
  return parse_expression(text, VariableTable(BlockLayout{1}.names(blocks)), kappa);
}

std::size_t oracle_rank(const SeriesMatrix& M) {
  std::vector<std::vector<Dense>> D(M.rows(), std::vector<Dense>(M.cols()));
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) D[i][j] = Dense::from_series(M(i, j));
  }
  return testing::brute_force_rank(D, detail::matrix_arity(M));
}

TEST(Jacobian, Examples) {
  const FormalMap F(2, {T(2, "t1*t2"), T(2, "t1^3 + i*t2")});
  const SeriesMatrix J = jacobian(F);
  ASSERT_EQ(J.rows(), 2u);
  ASSERT_EQ(J.cols(), 2u);
  EXPECT_EQ(J(0, 0), T(2, "t2", 7));
  EXPECT_EQ(J(0, 1), T(2, "t1", 7));
  EXPECT_EQ(J(1, 0), T(2, "3*t1^2", 7));
  EXPECT_EQ(J(1, 1), T(2, "i", 7));
}

TEST(GenericRank, HeisenbergSecondIterate) {
  SegreChain chain(testing::load_fixture("h"));
  const SeriesMatrix J = jacobian(chain.v(2));
  const RankCertificate c = generic_rank(J);
  EXPECT_EQ(c.rank, 2u);
  EXPECT_TRUE(c.stable);
  EXPECT_EQ(certificate_minor(J, c), T(2, "-2*i*t2", 7));
  ASSERT_EQ(c.witness.kind, RankWitness::Kind::coefficient);
  EXPECT_EQ(c.witness.value, GaussianRational(0, -2));
  EXPECT_TRUE(verify_certificate(J, c));
}

TEST(GenericRank, ZeroMatrix) {
  SeriesMatrix Z(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) Z(i, j) = TruncatedSeries(2, 5);
  }
  const RankCertificate c = generic_rank(Z);
  EXPECT_EQ(c.rank, 0u);
  EXPECT_EQ(c.witness.kind, RankWitness::Kind::none);
  EXPECT_TRUE(c.upper_checked);
  EXPECT_TRUE(verify_certificate(Z, c));
}

TEST(GenericRank, QuarticSecondIterate) {
  SegreChain chain(testing::load_fixture("l4"));
  EXPECT_EQ(chain.v(2)[1], T(2, "2*i*t1^2*t2^2"));
  const SeriesMatrix J = jacobian(chain.v(2));
  EXPECT_EQ(generic_rank(J).rank, 2u);
  EXPECT_EQ(oracle_rank(J), 2u);
}

TEST(GenericRank, TamperedCertificateIsRejected) {
  SegreChain chain(testing::load_fixture("h"));
  const SeriesMatrix J = jacobian(chain.v(2));
  RankCertificate c = generic_rank(J);
  c.witness.value = GaussianRational(1);
  EXPECT_FALSE(verify_certificate(J, c));
  c = generic_rank(J);
  c.minor_rows = {0};
  EXPECT_FALSE(verify_certificate(J, c));
}

// Random rectangular matrices, some with rows forced into the span of others.
SeriesMatrix random_matrix(testing::Rng& rng, std::size_t rows, std::size_t cols, std::size_t arity, int kappa) {
  SeriesMatrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      M(i, j) = rng.integer(0, 3) == 0 ? TruncatedSeries(arity, kappa) : rng.series(arity, kappa, 2, 2, 3);
    }
  }
  if (rows >= 2 && rng.coin()) {
    const TruncatedSeries a = rng.series(arity, kappa, 1, 1, 2);
    const TruncatedSeries b = rng.series(arity, kappa, 1, 1, 2);
    const std::size_t target = rows - 1;
    for (std::size_t j = 0; j < cols; ++j) M(target, j) = a * M(0, j) + (rows > 2 ? b * M(1, j) : TruncatedSeries(arity, kappa));
  }
  return M;
}

class RankOracle : public ::testing::TestWithParam<int> {};

TEST_P(RankOracle, MatchesBruteForceMinors) {
  testing::Rng rng(2000 + GetParam());
  const std::size_t rows = 1 + static_cast<std::size_t>(rng.integer(0, 3));
  const std::size_t cols = 1 + static_cast<std::size_t>(rng.integer(0, 3));
  const SeriesMatrix M = random_matrix(rng, rows, cols, 2, 12);
  const RankCertificate c = generic_rank(M);
  EXPECT_EQ(c.rank, oracle_rank(M));
  EXPECT_TRUE(c.upper_checked);
  EXPECT_TRUE(verify_certificate(M, c));
}

TEST_P(RankOracle, IndependentOfSeed) {
  testing::Rng rng(2100 + GetParam());
  const SeriesMatrix M = random_matrix(rng, 3, 3, 2, 12);
  RankOptions a;
  RankOptions b;
  b.seed = 0xABCDEF + static_cast<std::uint64_t>(GetParam());
  EXPECT_EQ(generic_rank(M, a).rank, generic_rank(M, b).rank);
}

INSTANTIATE_TEST_SUITE_P(Random, RankOracle, ::testing::Range(0, 40));

TEST(RankAlong, Loci) {
  const GenericManifold h = testing::load_fixture("h");
  SegreChain chain(h);
  const FormalMap& v2 = chain.v(2);
  const FormalMap identity = FormalMap::identity(2, 8);
  EXPECT_EQ(rank_along(v2, identity).rank, 2u);
  // t2 = 0 leaves only the z-part: rank n.
  const FormalMap first_axis(1, {T(1, "t1"), TruncatedSeries(1, 8)});
  EXPECT_EQ(rank_along(v2, first_axis).rank, 1u);
  // v^4 on the mirror locus (t1, t2, t1, 0) vanishes identically.
  const FormalMap mirror(2, {T(2, "t1"), T(2, "t2"), T(2, "t1"), TruncatedSeries(2, 8)});
  EXPECT_TRUE(compose(chain.v(4)[1], mirror).is_zero());
  EXPECT_THROW(rank_along(v2, FormalMap(1, {T(1, "t1")})), StructuralError);
}

TEST(SegreRanks, DeterministicAcrossJobs) {
  for (const auto& name : testing::fixture_names()) {
    const GenericManifold m = testing::load_fixture(name);
    RankOptions one;
    RankOptions four;
    four.jobs = 4;
    const auto a = segre_ranks(m, 4, one);
    const auto b = segre_ranks(m, 4, four);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].rank, b[k].rank);
      EXPECT_EQ(a[k].minor_rows, b[k].minor_rows);
      EXPECT_EQ(a[k].minor_cols, b[k].minor_cols);
      EXPECT_EQ(a[k].witness.exponent, b[k].witness.exponent);
      EXPECT_EQ(a[k].method, b[k].method);
    }
  }
}

TEST(RankProfile, Fixtures) {
  struct Expected {
    std::string name;
    std::vector<std::size_t> ranks;
    std::size_t k0;
  };
  for (const Expected& e : {Expected{"h", {1, 2, 2}, 2}, Expected{"flat", {1, 1, 1}, 1}, Expected{"l4", {1, 2, 2}, 2},
                            Expected{"c2", {1, 2, 3, 3}, 3}}) {
    const GenericManifold m = testing::load_fixture(e.name);
    const RankProfile p = rank_profile(m, m.d() + 2);
    EXPECT_EQ(p.ranks, e.ranks) << e.name;
    EXPECT_EQ(p.k0, e.k0) << e.name;
    EXPECT_TRUE(p.stable) << e.name;
    for (std::size_t j = 0; j < p.certificates.size(); ++j) {
      const GenericManifold at = reload(m, p.certificates[j].kappa_used);
      SegreChain chain(at);
      EXPECT_TRUE(verify_certificate(jacobian(chain.v(j + 1)), p.certificates[j])) << e.name << " v^" << j + 1;
    }
  }
}

TEST(RankProfile, FlatEscalatesAndStaysStable) {
  const RankProfile p = rank_profile(testing::load_fixture("flat"), 3);
  ASSERT_EQ(p.history.size(), 3u);
  EXPECT_EQ(p.history[1].kappa, 12);
  EXPECT_EQ(p.history[2].kappa, 16);
  EXPECT_TRUE(p.stable);
  RankOptions none;
  none.escalations = 0;
  EXPECT_FALSE(rank_profile(testing::load_fixture("flat"), 3, none).stable);
}

TEST(RankProfile, Preconditions) {
  EXPECT_THROW(rank_profile(testing::load_fixture("h"), 2), PreconditionError);
}

TEST(ValidateProfile, RejectsImpossibleProfiles) {
  EXPECT_EQ(validate_profile({1, 2, 2}, 2, 1), 2u);
  EXPECT_THROW(validate_profile({2, 2, 2}, 2, 1), InternalConsistencyError);
  EXPECT_THROW(validate_profile({1, 2, 1}, 2, 1), InternalConsistencyError);
  EXPECT_THROW(validate_profile({1, 1, 2}, 3, 2), InternalConsistencyError);
  EXPECT_THROW(validate_profile({1, 2, 3}, 3, 2), InconclusiveError);
  EXPECT_THROW(validate_profile({1, 3, 3}, 2, 1), InternalConsistencyError);
}

class RandomProfiles : public ::testing::TestWithParam<int> {};

TEST_P(RandomProfiles, MonotoneInTruncationOrder) {
  testing::Rng rng(2200 + GetParam());
  const GenericManifold m = load_manifold(testing::random_rigid_spec(rng, 3, 1 + GetParam() % 2), 5);
  RankOptions opt;
  opt.escalations = 0;
  std::vector<std::size_t> prev;
  for (int kappa : {5, 7, 9}) {
    const GenericManifold at = reload(m, kappa);
    const auto certs = segre_ranks(at, m.d() + 2, opt);
    std::vector<std::size_t> ranks;
    for (const auto& c : certs) ranks.push_back(c.rank);
    for (std::size_t j = 0; j < prev.size(); ++j) EXPECT_GE(ranks[j], prev[j]) << "kappa " << kappa;
    for (std::size_t j = 0; j + 1 < ranks.size(); ++j) EXPECT_LE(ranks[j], ranks[j + 1]);
    prev = ranks;
  }
}

INSTANTIATE_TEST_SUITE_P(Random, RandomProfiles, ::testing::Range(0, 10));

}  // namespace
}  // namespace segre
