#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace fcl;
using namespace fcl::testing;

namespace {

std::vector<double> from_roots(const std::vector<double>& roots, double lead = 1.0) {
  std::vector<double> c{lead};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = next;
  }
  return c;
}

}  // namespace

TEST(Descartes, CountsSignChangesSkippingZeros) {
  const std::vector<double> a{1, -2, 0, 3, -4};
  EXPECT_EQ(descartes_sign_changes(a), 3);
  const std::vector<double> b{1, 2, 3};
  EXPECT_EQ(descartes_sign_changes(b), 0);
  const std::vector<double> z{0, 0};
  EXPECT_THROW(descartes_sign_changes(z), DomainError);
}

TEST(PositiveRoots, SimpleRootsAscending) {
  const auto c = from_roots({3.0, 0.5, -2.0, 1.0});
  const auto r = positive_roots(c);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0].value, 0.5, 1e-12);
  EXPECT_NEAR(r[1].value, 1.0, 1e-12);
  EXPECT_NEAR(r[2].value, 3.0, 1e-12);
}

TEST(PositiveRoots, DoubleRootIsOneEntryOfMultiplicityTwo) {
  const auto c = from_roots({2.0, 2.0, -1.0});
  const auto r = positive_roots(c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].multiplicity, 2);
  EXPECT_NEAR(r[0].value, 2.0, 1e-7);
  EXPECT_EQ(count_with_multiplicity(r), 2);
}

TEST(PositiveRoots, ComplexPairsAndZeroRootsAreExcluded) {
  // (u^2 + 1)(u - 4) u
  const std::vector<double> c{0, -4, 1, -4, 1};
  const auto r = positive_roots(c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].value, 4.0, 1e-12);
}

TEST(PositiveRoots, WidelySpreadMagnitudes) {
  const auto c = from_roots({1e-4, 1.0, 1e4});
  const auto r = positive_roots(c);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0].value / 1e-4, 1.0, 1e-9);
  EXPECT_NEAR(r[2].value / 1e4, 1.0, 1e-9);
}

TEST(PositiveRoots, AgreesWithSturmOnRandomPolynomials) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  int compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int deg = 1 + trial % 5;
    std::vector<double> c(deg + 1);
    for (auto& x : c) x = coef(rng);
    const auto roots = positive_roots(c);
    // skip near-coalescent cases where distinct-root counting is ill-posed
    bool clustered = false;
    for (const auto& r : roots) clustered |= r.multiplicity > 1;
    for (std::size_t i = 1; i < roots.size(); ++i)
      clustered |= roots[i].value - roots[i - 1].value < 1e-6 * roots[i].value;
    if (clustered) continue;
    EXPECT_EQ(static_cast<int>(roots.size()), sturm_positive_count(c)) << "trial " << trial;
    EXPECT_LE(count_with_multiplicity(roots), descartes_sign_changes(c));
    ++compared;
  }
  EXPECT_GT(compared, 1900);
}

TEST(PositiveRoots, RejectsConstants) {
  const std::vector<double> c{1.0};
  EXPECT_THROW(positive_roots(c), DomainError);
}
