#pragma once

// T_s sweeps at fixed rate constants and T_e: classified states per grid
// point, branch linking, transcritical and saddle-node events, and
// continuation with state carry-over for hysteresis probes.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcl/dynamics.hpp"
#include "fcl/parallel.hpp"
#include "fcl/stability.hpp"
#include "fcl/steady_state.hpp"

namespace fcl {

enum class Spacing { linear, log };

inline std::vector<double> make_grid(double lo, double hi, int points, Spacing spacing) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw DomainError("grid needs 0 < Ts_min < Ts_max and at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    g[static_cast<std::size_t>(i)] =
        spacing == Spacing::linear ? lo + f * (hi - lo) : std::exp(std::log(lo) + f * std::log(hi / lo));
  }
  g.back() = hi;
  return g;
}

struct Branch {
  int id = 0;
  StateKind kind = StateKind::positive;
  std::vector<std::optional<SteadyStateRecord>> points;  // one slot per grid point

  bool present(std::size_t i) const { return points[i].has_value(); }
};

enum class EventType { transcritical, saddle_node };

inline std::string_view to_string(EventType t) {
  return t == EventType::transcritical ? "transcritical" : "saddle-node";
}

struct BifurcationEvent {
  EventType type;
  double T_s;
  std::vector<int> branches;
};

struct BranchSet {
  Variant variant = Variant::EEC2C1;
  double T_e = 0.0;
  std::vector<double> grid;
  std::vector<Branch> branches;
  std::vector<BifurcationEvent> events;
  std::vector<bool> degraded;
  std::vector<std::string> degraded_reason;
  std::vector<int> positive_count;  // with multiplicity, per grid point

  /// Records (any kind) present at grid point i.
  std::vector<const SteadyStateRecord*> records_at(std::size_t i) const {
    std::vector<const SteadyStateRecord*> out;
    for (const auto& b : branches)
      if (b.present(i)) out.push_back(&*b.points[i]);
    return out;
  }
};

inline constexpr double kBranchJumpCap = 0.25;

namespace detail {

inline double u_jump(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline void link_branches(BranchSet& bs, const std::vector<std::vector<SteadyStateRecord>>& per_point) {
  const std::size_t n = bs.grid.size();
  std::map<StateKind, int> boundary_branch;
  std::vector<int> open;  // positive branches present at the previous valid point
  std::size_t prev_positive = 0;
  bool have_prev = false;

  const auto new_branch = [&](StateKind kind) {
    Branch b;
    b.id = static_cast<int>(bs.branches.size());
    b.kind = kind;
    b.points.assign(n, std::nullopt);
    bs.branches.push_back(std::move(b));
    return bs.branches.back().id;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (bs.degraded[i]) continue;
    std::vector<const SteadyStateRecord*> pos;
    for (const auto& rec : per_point[i]) {
      if (rec.kind == StateKind::positive) {
        pos.push_back(&rec);
        continue;
      }
      auto it = boundary_branch.find(rec.kind);
      const int id = it == boundary_branch.end() ? (boundary_branch[rec.kind] = new_branch(rec.kind))
                                                 : it->second;
      bs.branches[static_cast<std::size_t>(id)].points[i] = rec;
    }
    std::sort(pos.begin(), pos.end(), [](auto a, auto b) { return *a->u < *b->u; });

    std::vector<int> assigned(pos.size(), -1);
    if (have_prev && pos.size() == prev_positive && !open.empty()) {
      // roots of a continuous family cannot cross without coalescing, so
      // with an unchanged count the u-ordering identifies the branches
      for (std::size_t r = 0; r < pos.size(); ++r) assigned[r] = open[r];
    } else if (have_prev) {
      struct Cand {
        double jump;
        std::size_t branch_slot, rec;
      };
      std::vector<Cand> cands;
      for (std::size_t j = 0; j < open.size(); ++j) {
        const auto& b = bs.branches[static_cast<std::size_t>(open[j])];
        double last_u = 0.0;
        for (std::size_t q = i; q-- > 0;)
          if (b.present(q)) {
            last_u = *b.points[q]->u;
            break;
          }
        for (std::size_t r = 0; r < pos.size(); ++r) cands.push_back({u_jump(last_u, *pos[r]->u), j, r});
      }
      std::sort(cands.begin(), cands.end(), [](auto& a, auto& b) { return a.jump < b.jump; });
      std::vector<bool> used(open.size(), false);
      for (const auto& c : cands) {
        if (c.jump > kBranchJumpCap) break;
        if (used[c.branch_slot] || assigned[c.rec] >= 0) continue;
        used[c.branch_slot] = true;
        assigned[c.rec] = open[c.branch_slot];
      }
    }
    open.assign(pos.size(), -1);
    for (std::size_t r = 0; r < pos.size(); ++r) {
      const int id = assigned[r] >= 0 ? assigned[r] : new_branch(StateKind::positive);
      bs.branches[static_cast<std::size_t>(id)].points[i] = *pos[r];
      open[r] = id;
    }
    prev_positive = pos.size();
    have_prev = true;
  }
}

}  // namespace detail

/// All classified steady states at every grid point, linked into branches.
/// Grid points are evaluated concurrently; a numerical failure marks the
/// point degraded and the sweep continues.
inline BranchSet sweep(const DerivedParams& p, double T_e, const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("sweep requires a non-empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw DomainError("sweep grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("sweep grid must be ascending");
  }
  BranchSet bs;
  bs.variant = p.variant;
  bs.T_e = T_e;
  bs.grid = grid;
  const std::size_t n = grid.size();
  bs.degraded.assign(n, false);
  bs.degraded_reason.assign(n, "");
  bs.positive_count.assign(n, 0);
  std::vector<std::vector<SteadyStateRecord>> per_point(n);
  std::vector<char> degraded(n, 0);

  parallel_for(n, [&](std::size_t i) {
    try {
      per_point[i] = analyze(p, {grid[i], T_e});
    } catch (const NumericalError& e) {
      degraded[i] = 1;
      bs.degraded_reason[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    bs.degraded[i] = degraded[i] != 0;
    for (const auto& r : per_point[i])
      if (r.kind == StateKind::positive) bs.positive_count[i] += r.multiplicity;
  }
  detail::link_branches(bs, per_point);
  return bs;
}

inline int positive_root_count(const DerivedParams& p, double T_e, double T_s) {
  return count_with_multiplicity(positive_roots(build_polynomial(p, T_e, T_s)));
}

enum class SaddleNodeMethod { automatic, root_count, discriminant };

/// Refines a saddle-node inside [lo, hi], whose endpoints must differ by two
/// in positive root count. EEC2C1 bisects on the sign of Disc(Q) unless
/// `root_count` is requested.
inline double saddle_node_locate(const DerivedParams& p, double T_e, double lo, double hi,
                                 SaddleNodeMethod method = SaddleNodeMethod::automatic) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("saddle_node_locate needs 0 < lo < hi");
  const int n_lo = positive_root_count(p, T_e, lo), n_hi = positive_root_count(p, T_e, hi);
  if (std::abs(n_lo - n_hi) != 2)
    throw DomainError("bracket does not straddle a change of two in the positive root count");

  const bool use_disc = method == SaddleNodeMethod::discriminant ||
                        (method == SaddleNodeMethod::automatic && p.variant == Variant::EEC2C1);
  if (use_disc) {
    if (p.variant != Variant::EEC2C1) throw DomainError("discriminant locator applies to EEC2C1 only");
    double d_lo = q_discriminant(p, T_e, lo);
    if ((d_lo > 0.0) == (q_discriminant(p, T_e, hi) > 0.0))
      throw DomainError("Disc(Q) does not change sign across the bracket");
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double d = q_discriminant(p, T_e, mid);
      if (d == 0.0) return mid;
      if ((d > 0.0) == (d_lo > 0.0)) {
        lo = mid;
        d_lo = d;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  for (int it = 0; it < 200 && hi - lo >= 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (positive_root_count(p, T_e, mid) == n_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Transcritical events at closed-form thresholds where some branch changes
/// stability, and saddle-nodes wherever the positive count jumps by two.
inline std::vector<BifurcationEvent> detect_events(const BranchSet& bs, const DerivedParams& p,
                                                   const Thresholds& th) {
  std::vector<BifurcationEvent> out;
  const auto& g = bs.grid;
  const std::size_t n = g.size();

  const auto valid_before = [&](double x) -> std::optional<std::size_t> {
    for (std::size_t i = n; i-- > 0;)
      if (!bs.degraded[i] && g[i] < x * (1.0 - 1e-12)) return i;
    return std::nullopt;
  };
  const auto valid_after = [&](double x) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i)
      if (!bs.degraded[i] && g[i] > x * (1.0 + 1e-12)) return i;
    return std::nullopt;
  };

  for (const auto& thr : {th.dead_loss, th.living_loss, th.single_site_onset}) {
    if (!thr) continue;
    const auto i = valid_before(*thr), j = valid_after(*thr);
    if (!i || !j) continue;
    BifurcationEvent ev{EventType::transcritical, *thr, {}};
    bool flip = false;
    for (const auto& b : bs.branches) {
      const bool a = b.present(*i), c = b.present(*j);
      if (a && c) {
        const auto sa = b.points[*i]->stability, sc = b.points[*j]->stability;
        if (sa != sc && (sa == Stability::stable || sc == Stability::stable)) {
          flip = true;
          ev.branches.push_back(b.id);
        }
      } else if (a != c) {
        ev.branches.push_back(b.id);  // born at, or absorbed into, the crossing
      }
    }
    if (flip) out.push_back(std::move(ev));
  }

  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (bs.degraded[i]) continue;
    if (prev && std::abs(bs.positive_count[i] - bs.positive_count[*prev]) == 2) {
      BifurcationEvent ev{EventType::saddle_node, 0.0, {}};
      try {
        ev.T_s = saddle_node_locate(p, bs.T_e, g[*prev], g[i]);
      } catch (const std::exception&) {
        ev.T_s = 0.5 * (g[*prev] + g[i]);
      }
      const bool born = bs.positive_count[i] > bs.positive_count[*prev];
      for (const auto& b : bs.branches) {
        if (b.kind != StateKind::positive) continue;
        if (born ? (b.present(i) && !b.present(*prev)) : (b.present(*prev) && !b.present(i)))
          ev.branches.push_back(b.id);
      }
      out.push_back(std::move(ev));
    }
    prev = i;
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.T_s < b.T_s; });
  return out;
}

struct CarryOverPoint {
  double T_s;
  SettleResult settled;
  std::vector<SteadyStateRecord> states;  // classified states at this T_s
  std::optional<StateKind> matched_kind;
};

// The settle test sits below the step-control noise floor of the default
// integrator tolerances once steps are stability-limited, hence the tighter pair.
struct CarryOverOptions {
  double t_max = 1e6;
  double convergence_tol = 1e-13;
  IntegratorOptions integrator{.rel_tol = 1e-12, .abs_tol = 1e-15};
};

/// Walks T_s through `path` starting from x0 (whose totals fix the first
/// value): each step adds the change in T_s in equal parts to the free
/// substrate species and lets the system settle.
inline std::vector<CarryOverPoint> carry_over_sweep(const DerivedParams& p, const StateVector& x0,
                                                    const std::vector<double>& path,
                                                    const CarryOverOptions& opt = {}) {
  std::vector<CarryOverPoint> out;
  StateVector x = x0;
  const std::vector<Species> free_substrates =
      is_single_site(p.variant) ? std::vector<Species>{Species::s0, Species::s1}
                                : std::vector<Species>{Species::s0, Species::s1, Species::s2};
  for (double Ts : path) {
    const Totals cur = conserved_totals(x);
    const double share = (Ts - cur.T_s) / static_cast<double>(free_substrates.size());
    for (Species s : free_substrates) {
      x[s] += share;
      if (x[s] < 0.0) throw DomainError("carry-over step would make a substrate negative");
    }
    CarryOverPoint pt;
    pt.T_s = Ts;
    pt.states = analyze(p, {Ts, cur.T_e});
    pt.settled = settle(p.rates, x, opt.t_max, opt.convergence_tol, pt.states, opt.integrator);
    if (pt.settled.matched) pt.matched_kind = pt.states[*pt.settled.matched].kind;
    x = pt.settled.final_state;
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace fcl
