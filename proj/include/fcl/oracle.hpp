#pragma once

// Brute-force steady states: damped Newton from many random starts in the
// compatibility polytope, on the square system of edge conditions,
// independent node conditions and both conservation laws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fcl/dynamics.hpp"
#include "fcl/kinetics.hpp"
#include "fcl/network.hpp"
#include "fcl/parallel.hpp"
#include "fcl/steady_state.hpp"

namespace fcl {

struct OracleOptions {
  int n_starts = 500;
  std::uint64_t seed = 1;
  int max_iterations = 200;
  double dedupe_tol = 1e-6;
  double boundary_tol = 1e-9;
};

struct OracleReport {
  std::vector<StateVector> found;
  std::vector<int> hits;  // starts converging to each found state
  int starts_attempted = 0;
  int converged = 0;
  int failed = 0;
  double mean_iterations = 0.0;
  std::uint64_t seed = 0;

  int positive_count() const {
    return static_cast<int>(std::count_if(found.begin(), found.end(),
                                          [](const StateVector& x) { return x.strictly_positive(); }));
  }
};

namespace detail {

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

class SteadyStateSystem {
 public:
  SteadyStateSystem(Variant v, const RateConstants& k, const Totals& t)
      : v_(v), k_(k), t_(t), n_(species_count(v)), scale_(rate_scale(k, v, t)),
        ws_(substrate_weights(v)), we_(enzyme_weights(v)) {
    for (const EdgeSpec& ed : edges(v))
      e_.push_back({dense_index(v, ed.tail), dense_index(v, ed.head), dense_index(v, ed.enzyme),
                    dense_index(v, ed.complex_), k.k_plus[ed.index],
                    k.k_minus[ed.index] + k.k_cat[ed.index], k.k_cat[ed.index]});
    // node conditions sum to zero; keep all but s1's
    nodes_ = is_single_site(v) ? std::vector<int>{dense_index(v, Species::s0)}
                               : std::vector<int>{dense_index(v, Species::s0), dense_index(v, Species::s2)};
  }

  int dimension() const { return n_; }
  double scale() const { return scale_; }

  void residual(const SmallVec& y, SmallVec& r) const {
    r.setZero(n_);
    int row = 0;
    for (const auto& ed : e_)
      r[row++] = (ed.kp * y[ed.tail] * y[ed.enz] - ed.koff * y[ed.cplx]) / scale_;
    for (int node : nodes_) {
      double L = 0.0;
      for (const auto& ed : e_) {
        if (ed.head == node) L += ed.kcat * y[ed.cplx];
        if (ed.tail == node) L -= ed.kcat * y[ed.cplx];
      }
      r[row++] = L / scale_;
    }
    r[row++] = (ws_.dot(y) - t_.T_s) / t_.T_s;
    r[row++] = (we_.dot(y) - t_.T_e) / t_.T_e;
  }

  void jacobian(const SmallVec& y, SmallMat& J) const {
    J.setZero(n_, n_);
    int row = 0;
    for (const auto& ed : e_) {
      J(row, ed.tail) += ed.kp * y[ed.enz] / scale_;
      J(row, ed.enz) += ed.kp * y[ed.tail] / scale_;
      J(row, ed.cplx) -= ed.koff / scale_;
      ++row;
    }
    for (int node : nodes_) {
      for (const auto& ed : e_) {
        if (ed.head == node) J(row, ed.cplx) += ed.kcat / scale_;
        if (ed.tail == node) J(row, ed.cplx) -= ed.kcat / scale_;
      }
      ++row;
    }
    for (int j = 0; j < n_; ++j) {
      J(row, j) = ws_[j] / t_.T_s;
      J(row + 1, j) = we_[j] / t_.T_e;
    }
  }

 private:
  struct Edge {
    int tail, head, enz, cplx;
    double kp, koff, kcat;
  };
  Variant v_;
  RateConstants k_;
  Totals t_;
  int n_;
  double scale_;
  Eigen::VectorXd ws_, we_;
  std::vector<Edge> e_;
  std::vector<int> nodes_;
};

template <typename Rng>
std::vector<double> dirichlet(Rng& rng, std::size_t n, double alpha = 1.0) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = gamma(rng));
  for (auto& x : w) x /= sum;
  return w;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// A random point of the compatibility class: the enzyme total is split
/// over free enzyme and complexes, then complexes are shrunk if their
/// substrate load (c3, c4 count twice) exceeds T_s, and the remaining
/// substrate is split over the free substrate species. Splits are
/// Dirichlet(alpha); alpha < 1 pushes samples toward faces and vertices.
template <typename Rng>
StateVector sample_compatibility_class(Variant v, const Totals& t, Rng& rng, double alpha = 1.0) {
  using S = Species;
  const std::vector<S> enzyme_species =
      is_single_site(v) ? std::vector<S>{S::e, S::c1, S::c2} : std::vector<S>{S::e, S::c1, S::c2, S::c3, S::c4};
  const std::vector<S> substrate_species =
      is_single_site(v) ? std::vector<S>{S::s0, S::s1} : std::vector<S>{S::s0, S::s1, S::s2};
  const Eigen::VectorXd ws = substrate_weights(v);

  StateVector x(v);
  const auto we = detail::dirichlet(rng, enzyme_species.size(), alpha);
  double load = 0.0;
  for (std::size_t i = 0; i < enzyme_species.size(); ++i) {
    x[enzyme_species[i]] = we[i] * t.T_e;
    load += ws[dense_index(v, enzyme_species[i])] * x[enzyme_species[i]];
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (load > 0.0) {
    const double cap = unit(rng) * t.T_s;
    if (load > cap) {
      const double f = cap / load;
      double moved = 0.0;
      for (std::size_t i = 1; i < enzyme_species.size(); ++i) {
        moved += (1.0 - f) * x[enzyme_species[i]];
        x[enzyme_species[i]] *= f;
      }
      x[S::e] += moved;
      load = cap;
    }
  }
  const double free = std::max(0.0, t.T_s - load);
  const auto wsub = detail::dirichlet(rng, substrate_species.size(), alpha);
  for (std::size_t i = 0; i < substrate_species.size(); ++i) x[substrate_species[i]] = wsub[i] * free;
  return x;
}

inline constexpr double kBoundaryDirichletAlpha = 0.1;

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  StateVector state;
};

/// Damped Newton with Armijo backtracking on |r|^2 and projection onto the
/// non-negative orthant.
inline NewtonOutcome damped_newton(const RateConstants& k, const Totals& t, const StateVector& start,
                                   const OracleOptions& opt = {}) {
  const Variant v = start.variant;
  const detail::SteadyStateSystem sys(v, k, t);
  const int n = sys.dimension();
  SmallVec y = start.dense(), r(n), y_try(n), r_try(n), step(n);
  detail::SmallMat J(n, n);
  NewtonOutcome out;

  sys.residual(y, r);
  double f = r.squaredNorm();
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    if (r.cwiseAbs().maxCoeff() < 1e-14) {
      out.converged = true;
      break;
    }
    sys.jacobian(y, J);
    Eigen::FullPivLU<detail::SmallMat> lu(J);
    if (!lu.isInvertible()) break;
    step = lu.solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda > 1e-10) {
      y_try = (y + lambda * step).cwiseMax(0.0);
      sys.residual(y_try, r_try);
      const double f_try = r_try.squaredNorm();
      if (f_try <= (1.0 - 1e-4 * lambda) * f) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // stagnation at the noise floor counts as convergence
      out.converged = r.cwiseAbs().maxCoeff() < 1e-12;
      break;
    }
    const double move = (y_try - y).cwiseAbs().maxCoeff();
    y = y_try;
    r = r_try;
    f = r.squaredNorm();
    if (move <= 1e-16 * y.cwiseAbs().maxCoeff() && r.cwiseAbs().maxCoeff() < 1e-12) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) out.converged = r.cwiseAbs().maxCoeff() < 1e-12;
  out.state = StateVector::from_dense(v, y);
  return out;
}

/// Residual checks every reported state must pass.
inline bool verifies_as_steady_state(const RateConstants& k, const Totals& t, const StateVector& x,
                                     double tol = 1e-10) {
  if (!x.non_negative()) return false;
  const double scale = rate_scale(k, x.variant, t);
  if (rhs(k, x).cwiseAbs().maxCoeff() >= tol * scale) return false;
  const Totals got = conserved_totals(x);
  return std::abs(got.T_s - t.T_s) < tol * t.T_s && std::abs(got.T_e - t.T_e) < tol * t.T_e;
}

inline OracleReport brute_force_steady_states(Variant v, const RateConstants& k, const Totals& t,
                                              const OracleOptions& opt = {}) {
  if (opt.n_starts < 100) throw DomainError("brute_force_steady_states requires n_starts >= 100");
  if (!(t.T_s > 0.0) || !(t.T_e > 0.0)) throw DomainError("totals must be positive");
  k.validate(v);
  const std::size_t n = static_cast<std::size_t>(opt.n_starts);
  std::vector<NewtonOutcome> runs(n);

  parallel_for(n, [&](std::size_t i) {
    std::mt19937_64 rng(detail::splitmix64(opt.seed ^ detail::splitmix64(i)));
    // odd starts sample near the boundary, where dead and living states sit
    const double alpha = i % 2 ? kBoundaryDirichletAlpha : 1.0;
    runs[i] = damped_newton(k, t, sample_compatibility_class(v, t, rng, alpha), opt);
  });

  OracleReport rep;
  rep.seed = opt.seed;
  rep.starts_attempted = opt.n_starts;
  double iters = 0.0;
  const double floor = opt.boundary_tol * std::max(t.T_s, t.T_e);
  for (auto& run : runs) {
    iters += run.iterations;
    if (!run.converged) {
      ++rep.failed;
      continue;
    }
    StateVector x = run.state;
    StateVector snapped = x;
    for (Species s : active_species(v))
      if (snapped[s] < floor) snapped[s] = 0.0;
    if (verifies_as_steady_state(k, t, snapped)) x = snapped;
    if (!verifies_as_steady_state(k, t, x)) {
      ++rep.failed;
      continue;
    }
    ++rep.converged;
    bool dup = false;
    for (std::size_t j = 0; j < rep.found.size(); ++j)
      if (relative_distance(x, rep.found[j]) <= opt.dedupe_tol) {
        ++rep.hits[j];
        dup = true;
        break;
      }
    if (!dup) {
      rep.found.push_back(x);
      rep.hits.push_back(1);
    }
  }
  rep.mean_iterations = iters / static_cast<double>(n);
  return rep;
}

struct MatchReport {
  std::vector<std::pair<std::size_t, std::size_t>> matched;  // (oracle, reference)
  std::vector<std::size_t> unmatched_oracle;
  std::vector<std::size_t> unmatched_reference;
  double max_matched_distance = 0.0;

  bool ok() const { return unmatched_oracle.empty() && unmatched_reference.empty(); }
};

/// Greedy bipartite nearest-neighbour matching under relative max-norm distance.
inline MatchReport compare_sets(const std::vector<StateVector>& found,
                                const std::vector<SteadyStateRecord>& reference, double tol) {
  struct Pair {
    double d;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < found.size(); ++a)
    for (std::size_t b = 0; b < reference.size(); ++b) {
      const double d = relative_distance(found[a], reference[b].coords);
      if (d <= tol) pairs.push_back({d, a, b});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  std::vector<bool> used_a(found.size(), false), used_b(reference.size(), false);
  MatchReport m;
  for (const auto& p : pairs) {
    if (used_a[p.a] || used_b[p.b]) continue;
    used_a[p.a] = used_b[p.b] = true;
    m.matched.emplace_back(p.a, p.b);
    m.max_matched_distance = std::max(m.max_matched_distance, p.d);
  }
  for (std::size_t a = 0; a < found.size(); ++a)
    if (!used_a[a]) m.unmatched_oracle.push_back(a);
  for (std::size_t b = 0; b < reference.size(); ++b)
    if (!used_b[b]) m.unmatched_reference.push_back(b);
  return m;
}

inline MatchReport compare_sets(const OracleReport& oracle, const std::vector<SteadyStateRecord>& reference,
                                double tol) {
  return compare_sets(oracle.found, reference, tol);
}

}  // namespace fcl
