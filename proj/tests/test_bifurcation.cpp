#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace fcl;
using namespace fcl::testing;

namespace {

BranchSet run(const RateConstants& k, Variant v, double Te, const std::vector<double>& grid) {
  const auto p = derive_params(k, v);
  auto bs = sweep(p, Te, grid);
  bs.events = detect_events(bs, p, thresholds(p, Te));
  return bs;
}

int count_events(const BranchSet& bs, EventType t) {
  return static_cast<int>(std::count_if(bs.events.begin(), bs.events.end(), [&](auto& e) { return e.type == t; }));
}

const Branch* branch_of_kind(const BranchSet& bs, StateKind k) {
  for (const auto& b : bs.branches)
    if (b.kind == k) return &b;
  return nullptr;
}

}  // namespace

TEST(Grid, LinearAndLog) {
  const auto g = make_grid(1.0, 100.0, 3, Spacing::log);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(g[2], 100.0);
  EXPECT_THROW(make_grid(0.0, 1.0, 10, Spacing::linear), DomainError);
  EXPECT_THROW(make_grid(1.0, 2.0, 1, Spacing::linear), DomainError);
  EXPECT_THROW(sweep(derive_params(fig4_rates(), Variant::EEC2C1), 1.0, {2.0, 1.0}), DomainError);
}

TEST(Sweep, OnePositiveStateDiagram) {
  const auto p = derive_params(fig4_rates(), Variant::EEC2C1);
  const auto th = thresholds(p, kFig4Te);
  const auto bs = run(fig4_rates(), Variant::EEC2C1, kFig4Te, linspace(0.1, 12.0, 400));
  ASSERT_EQ(bs.branches.size(), 3u);
  const auto* dead = branch_of_kind(bs, StateKind::dead_boundary);
  const auto* living = branch_of_kind(bs, StateKind::living_boundary);
  const auto* pos = branch_of_kind(bs, StateKind::positive);
  ASSERT_TRUE(dead && living && pos);
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    const double Ts = bs.grid[i];
    EXPECT_EQ(dead->points[i]->stability, Ts < *th.dead_loss ? Stability::stable : Stability::unstable);
    EXPECT_EQ(living->present(i), Ts > *th.dead_loss);
    if (living->present(i))
      EXPECT_EQ(living->points[i]->stability, Ts < *th.living_loss ? Stability::stable : Stability::unstable);
    EXPECT_EQ(pos->present(i), Ts > *th.living_loss);
    if (pos->present(i)) EXPECT_EQ(pos->points[i]->stability, Stability::stable);
  }
  ASSERT_EQ(bs.events.size(), 2u);
  EXPECT_EQ(bs.events[0].type, EventType::transcritical);
  EXPECT_NEAR(bs.events[0].T_s, 1.53846, 1e-5);
  EXPECT_EQ(bs.events[1].type, EventType::transcritical);
  EXPECT_NEAR(bs.events[1].T_s, *th.living_loss, 1e-12);
  // each transcritical involves exactly two branches
  for (const auto& e : bs.events) EXPECT_EQ(e.branches.size(), 2u);
}

TEST(Sweep, SingleSiteTranscriticalOnly) {
  const auto bs = run(fig3_rates(), Variant::EC1, kFig3Te, linspace(0.01, 2.0, 400));
  ASSERT_EQ(bs.events.size(), 1u);
  EXPECT_EQ(bs.events[0].type, EventType::transcritical);
  EXPECT_NEAR(bs.events[0].T_s, 0.4444, 1e-4);
  EXPECT_EQ(count_events(bs, EventType::saddle_node), 0);
}

TEST(Sweep, C1C1HasSaddleNodeButNoTranscritical) {
  const auto bs = run(eec1c1_rates(), Variant::EEC1C1, kEec1c1Te, linspace(0.09, 0.2, 400));
  EXPECT_EQ(count_events(bs, EventType::transcritical), 0);
  ASSERT_EQ(count_events(bs, EventType::saddle_node), 1);
  EXPECT_NEAR(bs.events[0].T_s, 0.10475, 5e-5);
  // one of the pair born there is stable, the other unstable
  std::set<Stability> born;
  for (int id : bs.events[0].branches) {
    const auto& b = bs.branches[static_cast<std::size_t>(id)];
    for (const auto& pt : b.points)
      if (pt) {
        born.insert(pt->stability);
        break;
      }
  }
  EXPECT_EQ(born, (std::set<Stability>{Stability::stable, Stability::unstable}));
  for (const auto& b : bs.branches)
    if (b.kind == StateKind::dead_boundary)
      for (const auto& pt : b.points) EXPECT_EQ(pt->stability, Stability::stable);
}

TEST(Sweep, BackwardBifurcation) {
  const auto p = derive_params(thm45_rates(), Variant::EEC2C1);
  const double T21 = *thresholds(p, kThm45Te).living_loss;
  const auto bs = run(thm45_rates(), Variant::EEC2C1, kThm45Te, linspace(14.0, 20.0, 400));
  ASSERT_EQ(count_events(bs, EventType::saddle_node), 1);
  ASSERT_EQ(count_events(bs, EventType::transcritical), 1);
  const auto& sn = bs.events[0];
  const auto& tc = bs.events[1];
  EXPECT_EQ(sn.type, EventType::saddle_node);
  EXPECT_LT(sn.T_s, T21);
  EXPECT_NEAR(tc.T_s, T21, 1e-12);
  EXPECT_NEAR(sn.T_s, 16.4533, 1e-3);
}

TEST(SaddleNode, DiscriminantAndCountLocatorsAgree) {
  const auto p = derive_params(thm45_rates(), Variant::EEC2C1);
  const double a = saddle_node_locate(p, kThm45Te, 16.0, 17.0, SaddleNodeMethod::discriminant);
  const double b = saddle_node_locate(p, kThm45Te, 16.0, 17.0, SaddleNodeMethod::root_count);
  EXPECT_NEAR(a, b, 1e-8 * a);
  const auto q = build_polynomial(p, kThm45Te, a).coeffs;
  EXPECT_LT(std::abs(q_discriminant(p, kThm45Te, a)), 1e-9 * q[1] * q[1]);
  EXPECT_GT(q_discriminant(p, kThm45Te, a * (1 + 1e-6)), 0.0);
  EXPECT_LT(a, *thresholds(p, kThm45Te).living_loss);
  EXPECT_THROW(saddle_node_locate(p, kThm45Te, 17.5, 18.0), DomainError);
}

TEST(SaddleNode, HigherDegreeVariantsBisectOnCount) {
  const auto p = derive_params(eec1c1_rates(), Variant::EEC1C1);
  const double s = saddle_node_locate(p, kEec1c1Te, 0.1047, 0.1048);
  EXPECT_EQ(positive_root_count(p, kEec1c1Te, s * (1 - 1e-9)), 0);
  EXPECT_EQ(positive_root_count(p, kEec1c1Te, s * (1 + 1e-9)), 2);
  EXPECT_THROW(saddle_node_locate(p, kEec1c1Te, 0.1047, 0.1048, SaddleNodeMethod::discriminant), DomainError);
}

TEST(Sweep, FourPositiveRecordsTwoStable) {
  const auto bs = run(thm49_rates(), Variant::EEC1C2, kThm49Te, linspace(10.0, 30.0, 400));
  int with_four = 0;
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    int pos = 0, stable = 0;
    for (const auto* r : bs.records_at(i))
      if (r->kind == StateKind::positive) {
        ++pos;
        stable += r->stability == Stability::stable;
      }
    if (pos == 4) {
      ++with_four;
      EXPECT_EQ(stable, 2);
    }
  }
  EXPECT_GT(with_four, 0);
  // 0 -> 2 -> 4 -> 2 positive states across the window
  EXPECT_EQ(count_events(bs, EventType::saddle_node), 3);
}

TEST(Sweep, CountsAcrAndCapacityAlongBranches) {
  struct Scenario {
    RateConstants k;
    Variant v;
    double Te, lo, hi;
  };
  const std::vector<Scenario> scenarios = {
      {fig3_rates(), Variant::EC1, kFig3Te, 0.01, 2.0},
      {fig4_rates(), Variant::EEC2C1, kFig4Te, 0.1, 12.0},
      {thm45_rates(), Variant::EEC2C1, kThm45Te, 14.0, 20.0},
      {eec1c1_rates(), Variant::EEC1C1, kEec1c1Te, 0.09, 0.2},
      {thm49_rates(), Variant::EEC1C2, kThm49Te, 10.0, 30.0},
      {fig6_caption_rates(), Variant::EEC1C2, kFig6CaptionTe, 765.0, 780.0},
      {thm49_rates(), Variant::EEC2C2, kThm49Te, 0.5, 30.0},
  };
  for (const auto& s : scenarios) {
    const auto p = derive_params(s.k, s.v);
    const auto bs = run(s.k, s.v, s.Te, linspace(s.lo, s.hi, 400));
    const auto acr = acr_predictions(p);
    for (std::size_t i = 0; i < bs.grid.size(); ++i) {
      ASSERT_FALSE(bs.degraded[i]);
      int records = 0;
      for (const auto* r : bs.records_at(i)) records += r->kind == StateKind::positive;
      EXPECT_EQ(records, static_cast<int>(positive_roots(build_polynomial(p, s.Te, bs.grid[i])).size()));
      EXPECT_LE(bs.positive_count[i], positive_capacity(s.v));
    }
    for (const auto& b : bs.branches) {
      if (b.kind != StateKind::positive) continue;
      for (const auto& pt : b.points)
        if (pt)
          for (const auto& a : acr)
            EXPECT_NEAR(acr_observed(a.quantity, pt->coords) / a.value, 1.0, 1e-8) << to_string(s.v);
    }
    for (const auto& e : bs.events) {
      EXPECT_GE(e.T_s, bs.grid.front());
      EXPECT_LE(e.T_s, bs.grid.back());
    }
  }
}

TEST(Hysteresis, CarryOverSweepsLandOnDifferentBranches) {
  const auto k = thm45_rates();
  const auto p = derive_params(k, Variant::EEC2C1);
  const double T21 = *thresholds(p, kThm45Te).living_loss;
  const double sn = saddle_node_locate(p, kThm45Te, 16.0, 17.0);
  const double probe = 0.5 * (sn + T21);

  // upward from below the saddle-node, starting at the stable living state
  const double lo = sn - 0.3;
  const auto start_up = *living_boundary_state(p, kThm45Te, lo);
  const auto up = carry_over_sweep(p, start_up.coords, {lo, sn - 0.1, sn + 0.1, probe});
  // downward from above T21, starting at the stable positive state
  const double hi = T21 + 0.3;
  const auto high_states = positive_steady_states(p, {hi, kThm45Te});
  ASSERT_EQ(high_states.size(), 1u);
  const auto down = carry_over_sweep(p, high_states[0].coords, {hi, T21 + 0.1, T21 - 0.1, probe});

  ASSERT_TRUE(up.back().matched_kind.has_value());
  ASSERT_TRUE(down.back().matched_kind.has_value());
  EXPECT_EQ(*up.back().matched_kind, StateKind::living_boundary);
  EXPECT_EQ(*down.back().matched_kind, StateKind::positive);
  EXPECT_GT(relative_distance(up.back().settled.final_state, down.back().settled.final_state), 1e-2);
}
