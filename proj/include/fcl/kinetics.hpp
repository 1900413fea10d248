#pragma once

// Mass-action right-hand sides assembled from edge terms G_l and node
// currents L_i, with the analytic Jacobian.

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "fcl/network.hpp"

namespace fcl {

/// G_l = k+_l s_tail eps_l - (k-_l + k_l) c_l, one entry per edge.
inline std::vector<double> edge_terms(const RateConstants& k, const StateVector& x) {
  std::vector<double> g;
  for (const EdgeSpec& ed : edges(x.variant)) {
    const int l = ed.index;
    g.push_back(k.k_plus[l] * x[ed.tail] * x[ed.enzyme] -
                (k.k_minus[l] + k.k_cat[l]) * x[ed.complex_]);
  }
  return g;
}

/// L_i = sum over edges with head i of k_l c_l minus the same over tails,
/// indexed by substrate (s0, s1[, s2]).
inline std::vector<double> node_currents(const RateConstants& k, const StateVector& x) {
  const int n_sub = is_single_site(x.variant) ? 2 : 3;
  std::vector<double> L(n_sub, 0.0);
  for (const EdgeSpec& ed : edges(x.variant)) {
    const double flux = k.k_cat[ed.index] * x[ed.complex_];
    L[static_cast<int>(ed.head)] += flux;
    L[static_cast<int>(ed.tail)] -= flux;
  }
  return L;
}

/// Every elementary reaction rate (binding, unbinding, catalysis) per edge.
inline std::vector<double> reaction_rates(const RateConstants& k, const StateVector& x) {
  std::vector<double> r;
  for (const EdgeSpec& ed : edges(x.variant)) {
    const int l = ed.index;
    r.push_back(k.k_plus[l] * x[ed.tail] * x[ed.enzyme]);
    r.push_back(k.k_minus[l] * x[ed.complex_]);
    r.push_back(k.k_cat[l] * x[ed.complex_]);
  }
  return r;
}

/// dx/dt in the dense species order of the variant.
inline Eigen::VectorXd rhs(const RateConstants& k, const StateVector& x) {
  const Variant v = x.variant;
  StateVector d(v);
  for (Species s : active_species(v)) d[s] = 0.0;
  const auto G = edge_terms(k, x);
  const auto L = node_currents(k, x);
  for (const EdgeSpec& ed : edges(v)) {
    const double g = G[static_cast<std::size_t>(ed.index)];
    d[ed.enzyme] -= g;
    d[ed.complex_] += g;
    d[ed.tail] -= g;
  }
  d[Species::s0] += L[0];
  d[Species::s1] += L[1];
  if (!is_single_site(v)) d[Species::s2] += L[2];
  return d.dense();
}

inline Eigen::VectorXd rhs(Variant v, const RateConstants& k, const Eigen::VectorXd& y) {
  return rhs(k, StateVector::from_dense(v, y));
}

/// Analytic d f_i / d x_j in the dense species order.
inline Eigen::MatrixXd mass_action_jacobian(const RateConstants& k, const StateVector& x) {
  const Variant v = x.variant;
  const int n = species_count(v);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (const EdgeSpec& ed : edges(v)) {
    const int l = ed.index;
    const int it = dense_index(v, ed.tail), ih = dense_index(v, ed.head);
    const int ie = dense_index(v, ed.enzyme), ic = dense_index(v, ed.complex_);
    // gradient of G_l
    const double dG_tail = k.k_plus[l] * x[ed.enzyme];
    const double dG_enz = k.k_plus[l] * x[ed.tail];
    const double dG_cplx = -(k.k_minus[l] + k.k_cat[l]);
    for (int row : {ie, it}) {
      J(row, it) -= dG_tail;
      J(row, ie) -= dG_enz;
      J(row, ic) -= dG_cplx;
    }
    J(ic, it) += dG_tail;
    J(ic, ie) += dG_enz;
    J(ic, ic) += dG_cplx;
    // catalytic flux k_l c_l moves tail -> head
    J(ih, ic) += k.k_cat[l];
    J(it, ic) -= k.k_cat[l];
  }
  return J;
}

/// Characteristic rate magnitude for a compatibility class; residual
/// tolerances are expressed relative to it.
inline double rate_scale(const RateConstants& k, Variant v, const Totals& t) {
  double s = 0.0;
  for (int l = 0; l < edge_count(v); ++l) {
    s = std::max(s, k.k_plus[l] * t.T_s * t.T_e);
    s = std::max(s, (k.k_minus[l] + k.k_cat[l]) * t.T_e);
  }
  return s;
}

}  // namespace fcl
