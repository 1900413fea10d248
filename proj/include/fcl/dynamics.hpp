#pragma once

// Adaptive Dormand-Prince 5(4) integration of the mass-action system, with
// attractor probing against a known steady-state set.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fcl/kinetics.hpp"
#include "fcl/network.hpp"
#include "fcl/steady_state.hpp"

namespace fcl {

using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

/// Allocation-free right-hand side over dense coordinates.
class MassActionSystem {
 public:
  MassActionSystem(Variant v, const RateConstants& k) : v_(v), n_(species_count(v)) {
    for (const EdgeSpec& ed : edges(v)) {
      const int l = ed.index;
      e_.push_back({dense_index(v, ed.tail), dense_index(v, ed.head), dense_index(v, ed.enzyme),
                    dense_index(v, ed.complex_), k.k_plus[l], k.k_minus[l] + k.k_cat[l], k.k_cat[l]});
    }
  }

  Variant variant() const { return v_; }
  int dimension() const { return n_; }

  void operator()(const SmallVec& y, SmallVec& dy) const {
    dy.setZero(n_);
    for (const auto& ed : e_) {
      const double g = ed.kp * y[ed.tail] * y[ed.enz] - ed.koff * y[ed.cplx];
      const double flux = ed.kcat * y[ed.cplx];
      dy[ed.enz] -= g;
      dy[ed.cplx] += g;
      dy[ed.tail] -= g + flux;
      dy[ed.head] += flux;
    }
  }

 private:
  struct Edge {
    int tail, head, enz, cplx;
    double kp, koff, kcat;
  };
  Variant v_;
  int n_;
  std::vector<Edge> e_;
};

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 picks a step from the initial derivative
  long max_steps = 20'000'000;
  bool record = true;
  double record_interval = 0.0;  // 0 records every accepted step
};

struct StepStatistics {
  long accepted = 0;
  long rejected = 0;
  long clamped = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<StateVector> states;
  StepStatistics stats;
  double final_residual = 0.0;        // max-norm of the right-hand side at the end
  double conservation_drift = 0.0;    // max relative deviation of (T_s, T_e)
  double min_coordinate = 0.0;        // most negative accepted coordinate before clamping
  bool stopped_early = false;
  StateVector final_state() const { return states.back(); }
};

/// Called after every accepted step; returning true ends the integration.
using StopPredicate = std::function<bool(double t, const SmallVec& y)>;

namespace detail {

inline double relative_drift(const Totals& a, const Totals& ref) {
  return std::max(std::abs(a.T_s - ref.T_s) / std::max(ref.T_s, 1e-300),
                  std::abs(a.T_e - ref.T_e) / std::max(ref.T_e, 1e-300));
}

inline Totals totals_of(const Eigen::VectorXd& ws, const Eigen::VectorXd& we, const SmallVec& y) {
  return {ws.dot(y), we.dot(y)};
}

}  // namespace detail

inline Trajectory integrate(const RateConstants& k, const StateVector& x0, double t_end,
                            const IntegratorOptions& opt = {}, const StopPredicate& stop = {}) {
  if (!(t_end > 0.0)) throw DomainError("integrate requires t_end > 0");
  if (!x0.non_negative()) throw DomainError("integrate requires a non-negative initial state");
  const Variant v = x0.variant;
  k.validate(v);
  const MassActionSystem f(v, k);
  const int n = f.dimension();

  // Dormand-Prince tableau
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Eigen::VectorXd ws = substrate_weights(v), we = enzyme_weights(v);
  SmallVec y = x0.dense();
  const Totals ref = detail::totals_of(ws, we, y);

  Trajectory tr;
  double t = 0.0;
  double next_record = 0.0;
  const auto record = [&](bool force) {
    if (!opt.record && !force) return;
    if (!force && opt.record_interval > 0.0 && t < next_record) return;
    tr.t.push_back(t);
    tr.states.push_back(StateVector::from_dense(v, y));
    next_record = t + opt.record_interval;
  };
  record(true);

  SmallVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);
  f(y, k1);

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, t_end);
  }

  const double clamp_floor = -10.0 * opt.abs_tol;
  while (t < t_end) {
    if (tr.stats.accepted + tr.stats.rejected >= opt.max_steps)
      throw NumericalError("integration step budget exhausted; the system is likely stiff at these "
                           "constants, loosen rel_tol or shorten t_end",
                           {t, h});
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw NumericalError("step size underflow; the system is stiff at these constants, loosen "
                           "rel_tol/abs_tol or use shorter horizons",
                           {t, h});
    if (t + h > t_end) h = t_end - t;

    tmp = y + h * (a21 * k1);
    f(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      en += (err[i] / sc) * (err[i] / sc);
    }
    en = std::sqrt(en / n);

    const double most_negative = ynew.minCoeff();
    if (en <= 1.0 && most_negative >= clamp_floor) {
      t += h;
      tr.min_coordinate = std::min(tr.min_coordinate, most_negative);
      bool clamped = false;
      for (int i = 0; i < n; ++i)
        if (ynew[i] < 0.0) {
          ynew[i] = 0.0;
          clamped = true;
        }
      if (clamped) {
        ++tr.stats.clamped;
        f(ynew, k7);
      }
      y = ynew;
      k1 = k7;  // first-same-as-last
      ++tr.stats.accepted;
      tr.conservation_drift =
          std::max(tr.conservation_drift, detail::relative_drift(detail::totals_of(ws, we, y), ref));
      record(false);
      if (stop && stop(t, y)) {
        tr.stopped_early = true;
        break;
      }
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      ++tr.stats.rejected;
      h *= en > 1.0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.5;
    }
  }
  if (!opt.record || tr.t.back() != t) record(true);
  tr.final_residual = k1.cwiseAbs().maxCoeff();
  return tr;
}

/// max_i |x_i - y_i| / max(|x|_inf, |y|_inf)
inline double relative_distance(const StateVector& a, const StateVector& b) {
  const Eigen::VectorXd x = a.dense(), y = b.dense();
  const double scale = std::max({x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff(), 1e-300});
  return (x - y).cwiseAbs().maxCoeff() / scale;
}

inline constexpr double kAttractorRadius = 1e-5;

struct SettleResult {
  StateVector final_state;
  bool converged = false;
  std::optional<std::size_t> matched;  // index into the supplied steady-state list
  double t = 0.0;
  double residual = 0.0;
  Trajectory trajectory;
};

inline std::optional<std::size_t> match_steady_state(const StateVector& x,
                                                     const std::vector<SteadyStateRecord>& known,
                                                     double radius = kAttractorRadius) {
  std::optional<std::size_t> best;
  double best_d = radius;
  for (std::size_t i = 0; i < known.size(); ++i) {
    const double d = relative_distance(x, known[i].coords);
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// Integrates until |rhs|_inf < convergence_tol * rate scale or t_max, then
/// matches the endpoint against `known`.
inline SettleResult settle(const RateConstants& k, const StateVector& x0, double t_max,
                           double convergence_tol, const std::vector<SteadyStateRecord>& known,
                           IntegratorOptions opt = {}) {
  const Variant v = x0.variant;
  const double scale = rate_scale(k, v, conserved_totals(x0));
  const MassActionSystem f(v, k);
  SmallVec dy(f.dimension());
  const double threshold = convergence_tol * scale;

  SettleResult res;
  {
    const SmallVec y0 = x0.dense();
    f(y0, dy);
    if (dy.cwiseAbs().maxCoeff() < threshold) {
      res.final_state = x0;
      res.converged = true;
      res.residual = dy.cwiseAbs().maxCoeff();
      res.matched = match_steady_state(x0, known);
      return res;
    }
  }
  opt.record = false;
  const StopPredicate stop = [&](double, const SmallVec& y) {
    f(y, dy);
    return dy.cwiseAbs().maxCoeff() < threshold;
  };
  res.trajectory = integrate(k, x0, t_max, opt, stop);
  res.final_state = res.trajectory.final_state();
  res.t = res.trajectory.t.back();
  res.residual = res.trajectory.final_residual;
  res.converged = res.residual < threshold;
  if (res.converged) res.matched = match_steady_state(res.final_state, known);
  return res;
}

/// A point of the same compatibility class at relative distance `eps` from
/// `x` in the direction of `toward`; both must share totals, and the convex
/// combination keeps every coordinate non-negative.
inline StateVector perturb_within_class(const StateVector& x, const StateVector& toward, double eps) {
  const Eigen::VectorXd a = x.dense(), b = toward.dense();
  const double dist = (b - a).cwiseAbs().maxCoeff();
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(dist > 0.0)) throw DomainError("perturbation direction is degenerate");
  const double lambda = std::min(1.0, eps * scale / dist);
  return StateVector::from_dense(x.variant, a + lambda * (b - a));
}

}  // namespace fcl
