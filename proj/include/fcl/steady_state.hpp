#pragma once

// Steady states through the one-variable parameterization u = c1/c2
// (u = c1/e for the single-site cycle): polynomial assembly, root isolation,
// state reconstruction, boundary states and closed-form thresholds.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcl/network.hpp"
#include "fcl/polynomial.hpp"

namespace fcl {

enum class StateKind { dead_boundary, living_boundary, positive };
enum class Stability { stable, unstable, marginal, not_assessed };

inline std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::dead_boundary: return "dead-boundary";
    case StateKind::living_boundary: return "living-boundary";
    case StateKind::positive: return "positive";
  }
  return "?";
}

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
    case Stability::not_assessed: return "not-assessed";
  }
  return "?";
}

struct SteadyStateRecord {
  StateKind kind = StateKind::positive;
  StateVector coords;
  std::optional<double> u;
  int multiplicity = 1;
  Stability stability = Stability::not_assessed;
  std::map<std::string, double> diagnostics;
};

struct UPolynomial {
  std::vector<double> coeffs;  // constant term first
  Variant variant = Variant::EEC2C1;
  Totals totals;
  DerivedParams params;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

namespace detail {

inline void require_totals(double T_e, double T_s) {
  if (!(T_e > 0.0) || !(T_s > 0.0)) throw DomainError("totals T_e and T_s must be positive");
}

// Single-site ratios: kappa2 = k1/k2, kappa1* = k1/k1*, ACR value k1/k2*.
struct SingleSiteRatios {
  double kappa2, kappa1_star, acr;
};

inline SingleSiteRatios single_site_ratios(const RateConstants& k) {
  return {k.k_cat[0] / k.k_cat[1], k.k_cat[0] / k.k_star(0), k.k_cat[0] / k.k_star(1)};
}

inline std::vector<double> single_site_coeffs(const RateConstants& k, double T_e, double T_s) {
  const auto r = single_site_ratios(k);
  return {r.acr - T_s,
          r.kappa1_star + (1.0 + 2.0 * r.kappa2) * T_e + (1.0 + r.kappa2) * (r.acr - T_s),
          r.kappa1_star * (1.0 + r.kappa2)};
}

}  // namespace detail

/// Steady-state polynomial in u. EEC2C1 and EEC2C2 are stored after the
/// division by u (Q and R); EC1 is the single-site quadratic.
inline UPolynomial build_polynomial(const DerivedParams& p, double T_e, double T_s) {
  detail::require_totals(T_e, T_s);
  UPolynomial poly{{}, p.variant, {T_s, T_e}, p};
  const double g = p.gamma, a0 = p.alpha0, a1 = p.alpha1, a2 = p.alpha2;
  const double A3 = p.a3, A4 = p.a4, B3 = p.b3, B4 = p.b4;
  switch (p.variant) {
    case Variant::EC1:
      poly.coeffs = detail::single_site_coeffs(p.rates, T_e, T_s);
      break;
    case Variant::EEC2C1:
      poly.coeffs = {B3 * T_e + (A3 + g) * (a1 + a2 - T_s),
                     B4 * T_e + (A3 + g) * a0 + A4 * (a1 + a2 - T_s), a0 * A4};
      break;
    case Variant::EEC1C1:
      poly.coeffs = {(A3 + g) * a2, B3 * T_e + A4 * a2 - (A3 + g) * (T_s - a1),
                     B4 * T_e + (A3 + g) * a0 - A4 * (T_s - a1), A4 * a0};
      break;
    case Variant::EEC1C2:
      poly.coeffs = {g * a2,
                     A3 * a2 - g * T_s,
                     B3 * T_e + g * a1 + A4 * a2 - A3 * T_s,
                     B4 * T_e + g * a0 + A3 * a1 - A4 * T_s,
                     A3 * a0 + A4 * a1,
                     A4 * a0};
      break;
    case Variant::EEC2C2:
      poly.coeffs = {g * (a2 - T_s), B3 * T_e + g * a1 + A3 * (a2 - T_s),
                     B4 * T_e + g * a0 + A3 * a1 + A4 * (a2 - T_s), A3 * a0 + A4 * a1, A4 * a0};
      break;
  }
  return poly;
}

/// The unexpanded steady-state equation at u: for dual-site variants
/// (a0 u^2 v1 + a1 u v1 + a2 w2 - T_s u)(gamma + v1(a4 u + a3)) + (b4 u + b3) T_e u v1,
/// for EC1 the single-site equation multiplied through by its denominator.
/// Agrees with build_polynomial up to the stored factor of u.
inline double steady_state_equation(const DerivedParams& p, double T_e, double T_s, double u) {
  if (is_single_site(p.variant)) {
    const auto r = detail::single_site_ratios(p.rates);
    return (r.kappa1_star * u + r.acr - T_s) * (1.0 + (1.0 + r.kappa2) * u) +
           (1.0 + 2.0 * r.kappa2) * u * T_e;
  }
  const auto sel = variant_selectors(p.variant, u);
  return (p.alpha0 * u * u * sel.v1 + p.alpha1 * u * sel.v1 + p.alpha2 * sel.w2 - T_s * u) *
             (p.gamma + sel.v1 * (p.a4 * u + p.a3)) +
         (p.b4 * u + p.b3) * T_e * u * sel.v1;
}

/// Power of u divided out of the stored polynomial.
inline int stored_u_factor(Variant v) {
  return (v == Variant::EEC2C1 || v == Variant::EEC2C2) ? 1 : 0;
}

inline std::vector<PolyRoot> positive_roots(const UPolynomial& p, double tol = 1e-12) {
  return positive_roots(std::span<const double>(p.coeffs), tol);
}

inline int descartes_sign_changes(const UPolynomial& p) {
  return descartes_sign_changes(std::span<const double>(p.coeffs));
}

/// Full steady state for a positive parameter value u.
inline StateVector reconstruct_state(const DerivedParams& p, double T_e, double u) {
  if (!(u > 0.0)) throw DomainError("reconstruct_state requires u > 0");
  StateVector x(p.variant);
  using S = Species;
  if (is_single_site(p.variant)) {
    const auto r = detail::single_site_ratios(p.rates);
    const double e = T_e / (1.0 + (1.0 + r.kappa2) * u);
    x[S::e] = e;
    x[S::c1] = u * e;
    x[S::c2] = r.kappa2 * u * e;
    x[S::s0] = r.kappa1_star * u;
    x[S::s1] = r.acr;
    return x;
  }
  const auto sel = variant_selectors(p.variant, u);
  const double c = T_e / (p.gamma / sel.v1 + p.a4 * u + p.a3);
  x[S::c2] = c;
  x[S::c1] = c * u;
  x[S::e] = p.gamma * c / sel.v1;
  x[S::s0] = p.alpha0 * u * sel.v1;
  x[S::s1] = p.alpha1 * sel.v1;
  x[S::s2] = p.alpha2 * sel.v2;
  x[S::c4] = p.beta4 * u * c;
  x[S::c3] = p.beta3 * c;
  return x;
}

inline std::vector<SteadyStateRecord> positive_steady_states(const DerivedParams& p, const Totals& t) {
  const auto poly = build_polynomial(p, t.T_e, t.T_s);
  std::vector<SteadyStateRecord> out;
  for (const PolyRoot& r : positive_roots(poly)) {
    SteadyStateRecord rec;
    rec.kind = StateKind::positive;
    rec.coords = reconstruct_state(p, t.T_e, r.value);
    rec.u = r.value;
    rec.multiplicity = r.multiplicity;
    out.push_back(std::move(rec));
  }
  return out;
}

inline SteadyStateRecord dead_boundary_state(Variant v, double T_e, double T_s) {
  detail::require_totals(T_e, T_s);
  SteadyStateRecord rec;
  rec.kind = StateKind::dead_boundary;
  rec.coords = StateVector(v);
  rec.coords[Species::e] = T_e;
  rec.coords[is_single_site(v) ? Species::s1 : Species::s2] = T_s;
  return rec;
}

struct SingleSiteClosedForm {
  double kappa2;
  double kappa2_star;
  double kappa1_star;
  double Delta;
  double u_positive;
};

/// Closed-form positive root of the single-site quadratic; absent unless
/// T_s > k1/k2*.
inline std::optional<SingleSiteClosedForm> single_site_explicit(const RateConstants& k, double T_e,
                                                                double T_s) {
  detail::require_totals(T_e, T_s);
  const auto r = detail::single_site_ratios(k);
  SingleSiteClosedForm f{};
  f.kappa2 = r.kappa2;
  f.kappa2_star = T_s - r.acr;
  f.kappa1_star = r.kappa1_star;
  if (!(f.kappa2_star > 0.0)) return std::nullopt;
  const double b = f.kappa1_star - f.kappa2_star * (1.0 + f.kappa2) + (1.0 + 2.0 * f.kappa2) * T_e;
  f.Delta = b * b + 4.0 * f.kappa1_star * f.kappa2_star * (1.0 + f.kappa2);
  // (sqrt(D) - b) / (2 a) rewritten without cancellation when b > 0
  const double denom = 2.0 * f.kappa1_star * (1.0 + f.kappa2);
  const double sq = std::sqrt(f.Delta);
  f.u_positive = b <= 0.0 ? (sq - b) / denom
                          : (2.0 * f.kappa2_star) / (sq + b);
  return f;
}

inline std::optional<SingleSiteClosedForm> single_site_explicit(const DerivedParams& p, double T_e,
                                                                double T_s) {
  return single_site_explicit(p.rates, T_e, T_s);
}

/// Rate constants of the S1 <-> S2 subsystem of (E,E,C2,C1) mapped onto the
/// single-site cycle: edge 2 -> edge 1, edge 3 -> edge 2.
inline RateConstants living_subsystem_rates(const RateConstants& k) {
  RateConstants m = k;
  for (int src : {1, 2}) {
    m.k_plus[src - 1] = k.k_plus[src];
    m.k_minus[src - 1] = k.k_minus[src];
    m.k_cat[src - 1] = k.k_cat[src];
  }
  m.k_plus[2] = m.k_plus[3] = m.k_minus[2] = m.k_minus[3] = m.k_cat[2] = m.k_cat[3] = 1.0;
  return m;
}

/// Boundary state with s0 = c1 = c4 = 0 and the S1 <-> S2 cycle active;
/// (E,E,C2,C1) only, present iff T_s > k2/k3*.
inline std::optional<SteadyStateRecord> living_boundary_state(const DerivedParams& p, double T_e,
                                                              double T_s) {
  if (p.variant != Variant::EEC2C1)
    throw DomainError("living boundary states exist only for EEC2C1");
  const RateConstants sub = living_subsystem_rates(p.rates);
  const auto cf = single_site_explicit(sub, T_e, T_s);
  if (!cf || !(cf->u_positive > 0.0)) return std::nullopt;
  const double u = cf->u_positive;
  const double e = T_e / (1.0 + (1.0 + cf->kappa2) * u);
  SteadyStateRecord rec;
  rec.kind = StateKind::living_boundary;
  rec.coords = StateVector(p.variant);
  using S = Species;
  rec.coords[S::e] = e;
  rec.coords[S::s1] = cf->kappa1_star * u;
  rec.coords[S::s2] = p.alpha2;
  rec.coords[S::c2] = u * e;
  rec.coords[S::c3] = cf->kappa2 * u * e;
  rec.diagnostics["subsystem_u"] = u;
  return rec;
}

/// Dead state plus (for EEC2C1) the living state, when it exists.
inline std::vector<SteadyStateRecord> boundary_steady_states(const DerivedParams& p, const Totals& t) {
  std::vector<SteadyStateRecord> out{dead_boundary_state(p.variant, t.T_e, t.T_s)};
  if (p.variant == Variant::EEC2C1)
    if (auto living = living_boundary_state(p, t.T_e, t.T_s)) out.push_back(std::move(*living));
  return out;
}

inline std::vector<SteadyStateRecord> all_steady_states(const DerivedParams& p, const Totals& t) {
  auto out = boundary_steady_states(p, t);
  for (auto& r : positive_steady_states(p, t)) out.push_back(std::move(r));
  return out;
}

struct Thresholds {
  std::optional<double> dead_loss;          // k2/k3*
  std::optional<double> living_loss;        // T_s^{2,1}
  std::optional<double> pss_onset;          // T_s^{1,1} = T_s^{1,2}
  std::optional<double> single_site_onset;  // k1/k2*
};

inline Thresholds thresholds(const DerivedParams& p, double T_e) {
  if (!(T_e > 0.0)) throw DomainError("thresholds require T_e > 0");
  Thresholds th;
  switch (p.variant) {
    case Variant::EC1:
      th.single_site_onset = p.rates.k_cat[0] / p.k_star[1];
      break;
    case Variant::EEC2C1:
      th.dead_loss = p.alpha2;
      th.living_loss = p.alpha1 + p.alpha2 + p.b3 * T_e / (p.a3 + p.gamma);
      break;
    case Variant::EEC2C2:
      th.dead_loss = p.alpha2;
      break;
    case Variant::EEC1C1:
    case Variant::EEC1C2:
      th.pss_onset = p.alpha0 + p.alpha1 + p.alpha2 + T_e * (p.b4 + p.b3) / (p.a4 + p.a3 + p.gamma);
      break;
  }
  return th;
}

struct AcrPrediction {
  std::string quantity;  // "s1", "s2", "s0*s2" or "s1*s2"
  double value;
};

inline std::vector<AcrPrediction> acr_predictions(const DerivedParams& p) {
  switch (p.variant) {
    case Variant::EC1: return {{"s1", p.rates.k_cat[0] / p.k_star[1]}};
    case Variant::EEC2C1: return {{"s1", p.alpha1}, {"s2", p.alpha2}};
    case Variant::EEC1C1: return {{"s1", p.alpha1}, {"s0*s2", p.alpha0 * p.alpha2}};
    case Variant::EEC1C2: return {{"s1*s2", p.alpha1 * p.alpha2}};
    case Variant::EEC2C2: return {{"s2", p.alpha2}};
  }
  return {};
}

/// Evaluates an ACR quantity name at a state.
inline double acr_observed(std::string_view quantity, const StateVector& x) {
  using S = Species;
  if (quantity == "s1") return x[S::s1];
  if (quantity == "s2") return x[S::s2];
  if (quantity == "s0*s2") return x[S::s0] * x[S::s2];
  if (quantity == "s1*s2") return x[S::s1] * x[S::s2];
  throw DomainError("unknown ACR quantity " + std::string(quantity));
}

struct AcrCheck {
  std::string quantity;
  double predicted = 0.0;
  double max_relative_deviation = 0.0;
  int samples = 0;
};

/// Evaluates every ACR quantity at all positive states over a (T_e, T_s) grid.
inline std::vector<AcrCheck> verify_acr(const DerivedParams& p, const std::vector<double>& Te_values,
                                        const std::vector<double>& Ts_values) {
  std::vector<AcrCheck> out;
  for (const auto& pred : acr_predictions(p)) out.push_back({pred.quantity, pred.value, 0.0, 0});
  for (double Te : Te_values)
    for (double Ts : Ts_values)
      for (const auto& rec : positive_steady_states(p, {Ts, Te}))
        for (auto& c : out) {
          const double got = acr_observed(c.quantity, rec.coords);
          c.max_relative_deviation =
              std::max(c.max_relative_deviation, std::abs(got - c.predicted) / std::abs(c.predicted));
          ++c.samples;
        }
  return out;
}

struct MultistationarityVerdict {
  bool precluded;
  std::string reason;  // "structural", "T_e bound" or empty
};

/// Sufficient conditions ruling out two positive states for (E,E,C2,C1).
inline MultistationarityVerdict multistationarity_precluded(const DerivedParams& p, double T_e) {
  if (p.variant != Variant::EEC2C1)
    throw DomainError("multistationarity_precluded applies to EEC2C1 only");
  const double ag = p.a3 + p.gamma;
  if (p.a4 * p.b3 < p.b4 * ag) return {true, "structural"};
  const double denom = p.a4 * p.b3 / ag - p.b4;
  if (denom > 0.0 && T_e < p.alpha0 * ag / denom) return {true, "T_e bound"};
  return {false, ""};
}

/// T_s interval outside which (E,E,C1,C2) cannot reach four sign changes.
inline std::optional<std::pair<double, double>> four_pss_window(const DerivedParams& p, double T_e) {
  if (p.variant != Variant::EEC1C2) throw DomainError("four_pss_window applies to EEC1C2 only");
  const double lo = std::max(p.a3 * p.alpha2 / p.gamma,
                             (p.b4 * T_e + p.gamma * p.alpha0 + p.a3 * p.alpha1) / p.a4);
  const double hi = (p.b3 * T_e + p.gamma * p.alpha1 + p.a4 * p.alpha2) / p.a3;
  if (lo < hi) return std::make_pair(lo, hi);
  return std::nullopt;
}

/// Capacity cap on positive steady states.
inline int positive_capacity(Variant v) {
  switch (v) {
    case Variant::EC1: return 1;
    case Variant::EEC2C1:
    case Variant::EEC1C1: return 2;
    case Variant::EEC2C2: return 3;
    case Variant::EEC1C2: return 4;
  }
  return 0;
}

/// Discriminant of the (E,E,C2,C1) quadratic Q(u).
inline double q_discriminant(const DerivedParams& p, double T_e, double T_s) {
  const auto q = build_polynomial(p, T_e, T_s).coeffs;
  return q[1] * q[1] - 4.0 * q[2] * q[0];
}

}  // namespace fcl
