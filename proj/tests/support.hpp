#pragma once

// Shared fixtures for the test suite: scenario constants, random parameter
// draws and an extended-precision Sturm-sequence root counter used only as
// an oracle for the double-precision root finder.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fcl/fcl.hpp"

namespace fcl::testing {

inline RateConstants rates12(std::array<double, 12> a) {
  RateConstants k;
  for (int l = 0; l < 4; ++l) {
    k.k_plus[l] = a[3 * l];
    k.k_minus[l] = a[3 * l + 1];
    k.k_cat[l] = a[3 * l + 2];
  }
  return k;
}

inline RateConstants fig3_rates() {
  RateConstants k = RateConstants::all_ones();
  k.k_plus[0] = 2, k.k_minus[0] = 1, k.k_cat[0] = 1;
  k.k_plus[1] = 3, k.k_minus[1] = 0.5, k.k_cat[1] = 1.5;
  return k;
}
inline RateConstants fig4_rates() { return rates12({3.33, 1.04, 1.04, 2, 1, 1, 1.3, 1, 1, 1.08, 2.15, 1.25}); }
inline RateConstants thm45_rates() { return rates12({38.33, 2.04, 2.04, 6, 3, 3, 6, 1, 1, 4.08, 8.15, 8.15}); }
inline RateConstants thm49_rates() { return rates12({645, 2.2, 2.2, 76.8, 4, 4, 8, 1, 1, 51, 10.87, 10.87}); }
inline RateConstants fig6_caption_rates() {
  return rates12({1, 1, 0.036, 1, 11.13, 1, 1, 4886.7, 1, 1, 1, 0.976});
}
inline RateConstants eec1c1_rates() { return rates12({1370, 2.7, 2.7, 214, 1, 1, 168, 1, 1, 582.7, 1.36, 1.36}); }

inline constexpr double kFig3Te = 1.0;
inline constexpr double kFig4Te = 1.8;
inline constexpr double kThm45Te = 10.8;
inline constexpr double kThm49Te = 12.45;
inline constexpr double kFig6CaptionTe = 661.0;
inline constexpr double kEec1c1Te = 0.06;

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
  return std::exp(d(rng));
}

/// Every rate constant log-uniform on [0.1, 10].
inline RateConstants random_rates(std::mt19937_64& rng) {
  RateConstants k;
  for (int l = 0; l < 4; ++l) {
    k.k_plus[l] = log_uniform(rng, 0.1, 10.0);
    k.k_minus[l] = log_uniform(rng, 0.1, 10.0);
    k.k_cat[l] = log_uniform(rng, 0.1, 10.0);
  }
  return k;
}

/// T_e log-uniform on [0.1, 10], T_s log-uniform on [0.1, 100].
inline Totals random_totals(std::mt19937_64& rng) {
  const double Te = log_uniform(rng, 0.1, 10.0);
  return {log_uniform(rng, 0.1, 100.0), Te};
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  return make_grid(lo, hi, n, Spacing::linear);
}

inline int count_stable(const std::vector<SteadyStateRecord>& rs, StateKind kind = StateKind::positive) {
  int n = 0;
  for (const auto& r : rs) n += r.kind == kind && r.stability == Stability::stable;
  return n;
}

inline int count_kind(const std::vector<SteadyStateRecord>& rs, StateKind kind) {
  int n = 0;
  for (const auto& r : rs) n += r.kind == kind;
  return n;
}

/// Distinct real roots of a polynomial in (0, inf) by Sturm's theorem, in
/// 100-digit binary floating point.
inline int sturm_positive_count(const std::vector<double>& coeffs) {
  using R = boost::multiprecision::cpp_bin_float_100;
  using Poly = std::vector<R>;  // ascending
  const auto trim = [](Poly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
  };
  Poly p(coeffs.begin(), coeffs.end());
  trim(p);
  Poly dp;
  for (std::size_t i = 1; i < p.size(); ++i) dp.push_back(p[i] * R(static_cast<double>(i)));
  const auto rem = [&](Poly a, const Poly& b) {
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
      const R f = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
      a.pop_back();
      if (a.empty()) a.push_back(0);
    }
    // scrub cancellation residue
    R scale = 0;
    for (const auto& x : a) scale = std::max(scale, abs(x));
    for (auto& x : a)
      if (abs(x) < scale * R(1e-80)) x = 0;
    trim(a);
    return a;
  };
  std::vector<Poly> seq{p, dp};
  while (seq.back().size() > 1) {
    Poly r = rem(seq[seq.size() - 2], seq.back());
    if (r.size() == 1 && r[0] == 0) break;
    for (auto& x : r) x = -x;
    seq.push_back(r);
  }
  const auto changes = [&](bool at_infinity) {
    int c = 0, last = 0;
    for (const auto& q : seq) {
      R v = 0;
      if (at_infinity) {
        v = q.back();
      } else {
        // sign just right of zero: lowest-order nonzero coefficient
        for (const auto& x : q)
          if (x != 0) {
            v = x;
            break;
          }
      }
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++c;
      last = s;
    }
    return c;
  };
  return changes(false) - changes(true);
}

}  // namespace fcl::testing
