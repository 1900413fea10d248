#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace fcl;
using namespace fcl::testing;

namespace {

MatchReport check(Variant v, const RateConstants& k, const Totals& t, int expect_positive) {
  const auto p = derive_params(k, v);
  const auto ref = all_steady_states(p, t);
  EXPECT_EQ(count_kind(ref, StateKind::positive), expect_positive);
  const auto rep = brute_force_steady_states(v, k, t, {});
  EXPECT_EQ(rep.positive_count(), expect_positive);
  EXPECT_EQ(rep.starts_attempted, 500);
  for (const auto& x : rep.found) EXPECT_TRUE(verifies_as_steady_state(k, t, x));
  return compare_sets(rep, ref, 1e-6);
}

}  // namespace

TEST(Oracle, ThreePositiveC2C2) {
  const auto m = check(Variant::EEC2C2, thm49_rates(), {19.5, kThm49Te}, 3);
  EXPECT_TRUE(m.ok());
}

TEST(Oracle, FourPositiveC1C2) {
  EXPECT_TRUE(check(Variant::EEC1C2, thm49_rates(), {18.5, kThm49Te}, 4).ok());
  EXPECT_TRUE(check(Variant::EEC1C2, fig6_caption_rates(), {772.5, kFig6CaptionTe}, 4).ok());
}

TEST(Oracle, SingleSiteBelowOnsetOnlyDead) {
  const auto m = check(Variant::EC1, fig3_rates(), {0.3, kFig3Te}, 0);
  EXPECT_TRUE(m.ok());
  EXPECT_EQ(m.matched.size(), 1u);
}

TEST(Oracle, BackwardBifurcationWindow) {
  EXPECT_TRUE(check(Variant::EEC2C1, thm45_rates(), {17.0, kThm45Te}, 2).ok());
}

TEST(Oracle, RejectsTooFewStarts) {
  OracleOptions opt;
  opt.n_starts = 50;
  EXPECT_THROW(brute_force_steady_states(Variant::EC1, fig3_rates(), {1.0, 1.0}, opt), DomainError);
}

TEST(Oracle, SampledStartsLieInTheClass) {
  std::mt19937_64 rng(5);
  for (Variant v : kAllVariants)
    for (int i = 0; i < 50; ++i) {
      const auto t = random_totals(rng);
      const auto x = sample_compatibility_class(v, t, rng);
      EXPECT_GE(x.dense().minCoeff(), 0.0);
      const auto got = conserved_totals(x);
      EXPECT_NEAR(got.T_s / t.T_s, 1.0, 1e-12);
      EXPECT_NEAR(got.T_e / t.T_e, 1.0, 1e-12);
    }
}

TEST(CompareSets, EmptyAndPerturbed) {
  EXPECT_TRUE(compare_sets(std::vector<StateVector>{}, {}, 1e-6).ok());
  const auto p = derive_params(thm45_rates(), Variant::EEC2C1);
  const auto ref = all_steady_states(p, {17.0, kThm45Te});
  std::vector<StateVector> found;
  for (const auto& r : ref) found.push_back(r.coords);
  auto m = compare_sets(found, ref, 1e-6);
  EXPECT_TRUE(m.ok());
  EXPECT_EQ(m.max_matched_distance, 0.0);
  for (Species sp : active_species(found[1].variant)) found[1][sp] *= 1.1;
  m = compare_sets(found, ref, 1e-6);
  EXPECT_EQ(m.unmatched_oracle, std::vector<std::size_t>{1});
  EXPECT_EQ(m.unmatched_reference, std::vector<std::size_t>{1});
}

TEST(Oracle, ThreadCountDoesNotChangeResults) {
  const auto k = thm49_rates();
  const Totals t{19.5, kThm49Te};
  OracleOptions opt;
  opt.n_starts = 200;
  opt.seed = 11;
  ::setenv("FCL_THREADS", "1", 1);
  const auto a = brute_force_steady_states(Variant::EEC2C2, k, t, opt);
  ::setenv("FCL_THREADS", "4", 1);
  const auto b = brute_force_steady_states(Variant::EEC2C2, k, t, opt);
  ::unsetenv("FCL_THREADS");
  ASSERT_EQ(a.found.size(), b.found.size());
  for (std::size_t i = 0; i < a.found.size(); ++i) EXPECT_EQ(a.found[i].dense(), b.found[i].dense());
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.converged, b.converged);
}

TEST(Oracle, RandomParametersAgreeWithPolynomialPipeline) {
  std::mt19937_64 rng(2024);
  for (Variant v : kAllVariants)
    for (int trial = 0; trial < 5; ++trial) {
      const auto k = random_rates(rng);
      const auto t = random_totals(rng);
      const auto ref = all_steady_states(derive_params(k, v), t);
      OracleOptions opt;
      opt.seed = rng();
      const auto rep = brute_force_steady_states(v, k, t, opt);
      const auto m = compare_sets(rep, ref, 1e-6);
      EXPECT_TRUE(m.ok()) << to_string(v) << " trial " << trial;
    }
}
