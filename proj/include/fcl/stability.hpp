#pragma once

// Local stability: Jacobian spectra restricted to the stoichiometric subspace
// for interior states, next-generation matrices for boundary states, and the
// Routh-Hurwitz coefficients of the single-site cycle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fcl/kinetics.hpp"
#include "fcl/network.hpp"
#include "fcl/steady_state.hpp"

namespace fcl {

inline constexpr double kEigenMarginalTol = 1e-8;
inline constexpr double kRhoMarginalTol = 1e-12;

/// Orthonormal basis (columns) of the orthogonal complement of the two
/// conservation vectors, i.e. of the stoichiometric subspace.
inline Eigen::MatrixXd stoichiometric_basis(Variant v) {
  const int n = species_count(v);
  Eigen::MatrixXd W(n, 2);
  W.col(0) = substrate_weights(v);
  W.col(1) = enzyme_weights(v);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 2);
}

struct JacobianReport {
  Eigen::MatrixXd jacobian;
  std::vector<std::complex<double>> reduced_eigenvalues;
  double max_real_part = 0.0;
  Stability verdict = Stability::marginal;
};

inline std::vector<std::complex<double>> sorted_spectrum(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return ev;
}

inline JacobianReport reduced_eigenvalues(const Eigen::MatrixXd& J, Variant v,
                                          double tol = kEigenMarginalTol) {
  const int n = species_count(v);
  if (J.rows() != n || J.cols() != n) throw DomainError("Jacobian dimension does not match variant");
  const Eigen::MatrixXd Q = stoichiometric_basis(v);
  JacobianReport rep;
  rep.jacobian = J;
  rep.reduced_eigenvalues = sorted_spectrum(Q.transpose() * J * Q);
  rep.max_real_part = rep.reduced_eigenvalues.front().real();
  if (rep.max_real_part < -tol)
    rep.verdict = Stability::stable;
  else if (rep.max_real_part > tol)
    rep.verdict = Stability::unstable;
  else
    rep.verdict = Stability::marginal;
  return rep;
}

// ---------------------------------------------------------------------------
// Next-generation matrices

/// Species that vanish at a boundary state, in the row order of F and V.
inline std::vector<Species> vanishing_species(Variant v, StateKind kind) {
  using S = Species;
  if (kind == StateKind::positive) throw DomainError("positive states have no vanishing species");
  if (is_single_site(v)) return {S::s0, S::c1, S::c2};
  if (kind == StateKind::living_boundary) {
    if (v != Variant::EEC2C1) throw DomainError("living boundary states exist only for EEC2C1");
    return {S::s0, S::c1, S::c4};
  }
  return {S::s0, S::s1, S::c1, S::c2, S::c3, S::c4};
}

struct NgmSplit {
  Eigen::VectorXd production;  // script F
  Eigen::VectorXd outflow;     // script V
};

namespace detail {

struct DualEnzymes {
  Species e3, e4;  // enzymes of S2->S1 and S1->S0
};

inline DualEnzymes dual_enzymes(Variant v) {
  const auto ed = edges(v);
  return {ed[2].enzyme, ed[3].enzyme};
}

}  // namespace detail

/// The production / outflow split of the vanishing-species equations,
/// evaluated at an arbitrary state (f restricted to those rows = F - V).
inline NgmSplit ngm_split(Variant v, StateKind kind, const RateConstants& k, const StateVector& x) {
  using S = Species;
  const auto kp = k.k_plus, km = k.k_minus, kc = k.k_cat;
  const double s0 = x[S::s0], s1 = x[S::s1], e = x[S::e], c1 = x[S::c1], c2 = x[S::c2];
  NgmSplit out;
  if (is_single_site(v)) {
    out.production = Eigen::Vector3d(kc[1] * c2, 0.0, 0.0);
    out.outflow = Eigen::Vector3d(kp[0] * s0 * e - km[0] * c1,
                                  -kp[0] * s0 * e + (km[0] + kc[0]) * c1 + kp[1] * s1 * c1 -
                                      (km[1] + kc[1]) * c2,
                                  -kp[1] * s1 * c1 + (km[1] + kc[1]) * c2);
    return out;
  }
  const double s2 = x[S::s2], c3 = x[S::c3], c4 = x[S::c4];
  if (kind == StateKind::living_boundary) {
    vanishing_species(v, kind);
    out.production = Eigen::Vector3d(kc[3] * c4, 0.0, 0.0);
    out.outflow = Eigen::Vector3d(kp[0] * s0 * e - km[0] * c1,
                                  -kp[0] * s0 * e + (km[0] + kc[0]) * c1 + kp[3] * s1 * c1 -
                                      (km[3] + kc[3]) * c4,
                                  -kp[3] * s1 * c1 + (km[3] + kc[3]) * c4);
    return out;
  }
  const auto enz = detail::dual_enzymes(v);
  const double eps3 = x[enz.e3], eps4 = x[enz.e4];
  const double bind3 = kp[2] * s2 * eps3 - (km[2] + kc[2]) * c3;
  const double bind4 = kp[3] * s1 * eps4 - (km[3] + kc[3]) * c4;
  out.production = Eigen::VectorXd::Zero(6);
  out.production[1] = kc[2] * c3;
  out.outflow.resize(6);
  out.outflow << kp[0] * s0 * e - km[0] * c1 - kc[3] * c4,
      kp[3] * s1 * eps4 + kp[1] * s1 * e - kc[0] * c1 - km[1] * c2 - km[3] * c4,
      -kp[0] * s0 * e + (km[0] + kc[0]) * c1 + (enz.e3 == S::c1 ? bind3 : 0.0) +
          (enz.e4 == S::c1 ? bind4 : 0.0),
      -kp[1] * s1 * e + (km[1] + kc[1]) * c2 + (enz.e3 == S::c2 ? bind3 : 0.0) +
          (enz.e4 == S::c2 ? bind4 : 0.0),
      -kp[2] * s2 * eps3 + (km[2] + kc[2]) * c3, -kp[3] * s1 * eps4 + (km[3] + kc[3]) * c4;
  return out;
}

struct NgmJacobians {
  Eigen::MatrixXd F, V;
};

/// Jacobians of the split with respect to the vanishing species at x.
inline NgmJacobians ngm_jacobians(Variant v, StateKind kind, const RateConstants& k,
                                  const StateVector& x) {
  using S = Species;
  const auto kp = k.k_plus, km = k.k_minus, kc = k.k_cat;
  const double e = x[S::e], s1 = x[S::s1];
  NgmJacobians m;
  if (is_single_site(v)) {
    m.F = Eigen::Matrix3d::Zero();
    m.F(0, 2) = kc[1];
    m.V.resize(3, 3);
    m.V << kp[0] * e, -km[0], 0.0,
        -kp[0] * e, kp[1] * s1 + km[0] + kc[0], -(km[1] + kc[1]),
        0.0, -kp[1] * s1, km[1] + kc[1];
    return m;
  }
  if (kind == StateKind::living_boundary) {
    vanishing_species(v, kind);
    m.F = Eigen::Matrix3d::Zero();
    m.F(0, 2) = kc[3];
    m.V.resize(3, 3);
    m.V << kp[0] * e, -km[0], 0.0,
        -kp[0] * e, kp[3] * s1 + kc[0] + km[0], -(km[3] + kc[3]),
        0.0, -kp[3] * s1, km[3] + kc[3];
    return m;
  }
  const auto enz = detail::dual_enzymes(v);
  const double s2 = x[S::s2], c1 = x[S::c1], c2 = x[S::c2];
  const double eps3 = x[enz.e3], eps4 = x[enz.e4];
  const double i3c1 = enz.e3 == S::c1, i3c2 = enz.e3 == S::c2;
  const double i4c1 = enz.e4 == S::c1, i4c2 = enz.e4 == S::c2;
  m.F = Eigen::MatrixXd::Zero(6, 6);
  m.F(1, 4) = kc[2];
  m.V = Eigen::MatrixXd::Zero(6, 6);
  // columns: s0, s1, c1, c2, c3, c4
  m.V(0, 0) = kp[0] * e;
  m.V(0, 2) = -km[0];
  m.V(0, 5) = -kc[3];

  m.V(1, 1) = kp[3] * eps4 + kp[1] * e;
  m.V(1, 2) = -kc[0] + kp[3] * s1 * i4c1;
  m.V(1, 3) = -km[1] + kp[3] * s1 * i4c2;
  m.V(1, 5) = -km[3];

  m.V(2, 0) = -kp[0] * e;
  m.V(2, 1) = i4c1 * kp[3] * c1;
  m.V(2, 2) = km[0] + kc[0] + i3c1 * kp[2] * s2 + i4c1 * kp[3] * s1;
  m.V(2, 4) = -i3c1 * (km[2] + kc[2]);
  m.V(2, 5) = -i4c1 * (km[3] + kc[3]);

  m.V(3, 1) = -kp[1] * e + i4c2 * kp[3] * c2;
  m.V(3, 3) = km[1] + kc[1] + i3c2 * kp[2] * s2 + i4c2 * kp[3] * s1;
  m.V(3, 4) = -i3c2 * (km[2] + kc[2]);
  m.V(3, 5) = -i4c2 * (km[3] + kc[3]);

  m.V(4, 2) = -i3c1 * kp[2] * s2;
  m.V(4, 3) = -i3c2 * kp[2] * s2;
  m.V(4, 4) = km[2] + kc[2];

  m.V(5, 1) = -kp[3] * eps4;
  m.V(5, 2) = -i4c1 * kp[3] * s1;
  m.V(5, 3) = -i4c2 * kp[3] * s1;
  m.V(5, 5) = km[3] + kc[3];
  return m;
}

struct NgmFlags {
  bool f_nonnegative_nonzero = false;
  bool v_z_matrix = false;
  bool v_invertible = false;
  bool v_inverse_nonnegative = false;
  bool face_stable = false;

  bool all() const {
    return f_nonnegative_nonzero && v_z_matrix && v_invertible && v_inverse_nonnegative && face_stable;
  }
};

struct NgmReport {
  std::vector<Species> vanishing;
  Eigen::MatrixXd F, V, V_inverse, next_generation;
  double rho = 0.0;
  double v_condition = 0.0;
  NgmFlags flags;
};

struct RouthHurwitzReport {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  bool all_positive = false;
  bool hurwitz_product = false;  // a1 a2 > a0 a3
  bool verdict = false;
};

/// Characteristic-polynomial coefficients of the single-site Jacobian at the
/// positive steady state with parameter u = c1/e.
inline RouthHurwitzReport routh_hurwitz_single_site(const RateConstants& k, double T_e, double u) {
  if (!(u > 0.0)) throw DomainError("routh_hurwitz_single_site requires u > 0");
  const double k1 = k.k_cat[0], k1m = k.k_minus[0], k1p = k.k_plus[0];
  const double k2 = k.k_cat[1], k2m = k.k_minus[1], k2p = k.k_plus[1];
  const double Te = T_e;
  const double w = 1.0 + u;
  RouthHurwitzReport r;
  r.a0 = k2 * k2 * k2p * Te * u *
         (k2 * (k2 * (k1 + k1m) + (2 * k1 + k2) * k1p * Te) + 2 * k2 * (k1 + k2) * (k1 + k1m) * u +
          (k1 + k2) * (k1 + k2) * (k1 + k1m) * u * u);
  r.a1 = std::pow(k1, 4) * (k2 + k2m) * u * u * u +
         std::pow(k1, 3) * (k2 + k2m) * u * u * (k1m * u + 3 * k2 * w) +
         k1 * k1 * k2 * u *
             (k2m * k1p * Te + 3 * k1m * k2m * u * w + 3 * k2 * k2 * w * w +
              k2 * (2 * k1p * Te + 3 * k1m * u * w + 3 * k2m * w * w + k2p * Te * u * (2 + u))) +
         std::pow(k2, 3) * ((k2m + k2m * u + k2p * Te * u) * (k1p * Te + k1m * w * w) +
                            k2 * w * (k1m * w * w + Te * (k1p + k2p * u))) +
         k1 * k2 * k2 *
             (k1m * k2p * Te * u * u * w + 3 * k1m * k2m * u * w * w + k2 * k2 * w * w * w +
              k2m * k1p * (Te + 2 * Te * u) +
              k2 * (3 * k1m * u * w * w + k2m * w * w * w + k1p * Te * (2 + 3 * u) +
                    k2p * Te * u * (2 + u * (4 + u))));
  r.a2 = (k2 + (k1 + k2) * u) *
         (k2 * k2 * (k2 + k1m + k2m + k1p * Te + (k2 + 2 * k1m + k2m + k2p * Te) * u + k1m * u * u) +
          k1 * k1 * u * (k2m + k2 * (2 + u)) +
          k1 * k2 * (k2m + u * (k1m + 2 * k2m + k1m * u) + k2 * (2 + u * (4 + u))));
  r.a3 = k2 * (k2 + (k1 + k2) * u) * (k2 + (k1 + k2) * u);
  r.all_positive = r.a0 > 0 && r.a1 > 0 && r.a2 > 0 && r.a3 > 0;
  r.hurwitz_product = r.a1 * r.a2 > r.a0 * r.a3;
  r.verdict = r.all_positive && r.hurwitz_product;
  return r;
}

/// Closed-form spectral radius of F V^{-1} for a boundary record.
inline double closed_form_rho(Variant v, const SteadyStateRecord& bss, const RateConstants& k,
                              const Totals& t) {
  switch (v) {
    case Variant::EC1: return k.k_star(1) * t.T_s / k.k_cat[0];
    case Variant::EEC1C1:
    case Variant::EEC1C2: return 0.0;
    case Variant::EEC2C2: return k.k_star(2) * t.T_s / k.k_cat[1];
    case Variant::EEC2C1:
      if (bss.kind == StateKind::living_boundary)
        return k.k_star(3) * bss.coords[Species::s1] / k.k_cat[0];
      return k.k_star(2) * t.T_s / k.k_cat[1];
  }
  return 0.0;
}

inline NgmReport ngm_matrices(Variant v, const SteadyStateRecord& bss, const RateConstants& k,
                              const Totals& t) {
  if (bss.kind == StateKind::positive) throw DomainError("ngm_matrices requires a boundary state");
  NgmReport rep;
  rep.vanishing = vanishing_species(v, bss.kind);
  auto m = ngm_jacobians(v, bss.kind, k, bss.coords);
  rep.F = std::move(m.F);
  rep.V = std::move(m.V);

  const Eigen::Index n = rep.V.rows();
  rep.flags.f_nonnegative_nonzero = (rep.F.array() >= 0.0).all() && (rep.F.array() > 0.0).any();
  rep.flags.v_z_matrix = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && rep.V(i, j) > 0.0) rep.flags.v_z_matrix = false;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(rep.V);
  rep.v_condition = 1.0 / std::max(lu.rcond(), 1e-300);
  if (!lu.isInvertible() || lu.rcond() < 1e-14)
    throw NumericalError("next-generation V matrix is numerically singular", {rep.v_condition});
  rep.flags.v_invertible = true;
  rep.V_inverse = lu.inverse();
  const double scale = rep.V_inverse.cwiseAbs().maxCoeff();
  rep.flags.v_inverse_nonnegative = (rep.V_inverse.array() >= -1e-12 * scale).all();
  rep.next_generation = rep.F * rep.V_inverse;

  double rho = 0.0;
  for (const auto& ev : sorted_spectrum(rep.next_generation)) rho = std::max(rho, std::abs(ev));
  rep.rho = rho;

  if (bss.kind == StateKind::dead_boundary) {
    // the face meets the compatibility class in the single point x*
    rep.flags.face_stable = true;
  } else {
    const auto it = bss.diagnostics.find("subsystem_u");
    if (it != bss.diagnostics.end())
      rep.flags.face_stable =
          routh_hurwitz_single_site(living_subsystem_rates(k), t.T_e, it->second).verdict;
  }
  return rep;
}

inline Stability verdict_from_rho(double rho, double tol = kRhoMarginalTol) {
  if (rho < 1.0 - tol) return Stability::stable;
  if (rho > 1.0 + tol) return Stability::unstable;
  return Stability::marginal;
}

/// Fills the stability of a boundary record from rho(F V^{-1}); refuses
/// (not-assessed, "ngm_refused" = 1) when the hypotheses do not hold.
inline SteadyStateRecord classify_boundary(Variant v, SteadyStateRecord bss, const RateConstants& k,
                                           const Totals& t) {
  const NgmReport rep = ngm_matrices(v, bss, k, t);
  bss.diagnostics["rho"] = rep.rho;
  bss.diagnostics["rho_closed_form"] = closed_form_rho(v, bss, k, t);
  if (!rep.flags.all()) {
    bss.stability = Stability::not_assessed;
    bss.diagnostics["ngm_refused"] = 1.0;
    return bss;
  }
  bss.stability = verdict_from_rho(rep.rho);
  return bss;
}

inline SteadyStateRecord classify_positive(const RateConstants& k, SteadyStateRecord rec) {
  const auto rep = reduced_eigenvalues(mass_action_jacobian(k, rec.coords), rec.coords.variant);
  rec.stability = rep.verdict;
  rec.diagnostics["max_eig_real"] = rep.max_real_part;
  if (is_single_site(rec.coords.variant) && rec.u) {
    const auto rh = routh_hurwitz_single_site(k, conserved_totals(rec.coords).T_e, *rec.u);
    rec.diagnostics["routh_hurwitz"] = rh.verdict ? 1.0 : 0.0;
  }
  return rec;
}

/// Every steady state of the class with its stability verdict.
inline std::vector<SteadyStateRecord> analyze(const DerivedParams& p, const Totals& t) {
  std::vector<SteadyStateRecord> out;
  for (auto& rec : all_steady_states(p, t)) {
    if (rec.kind == StateKind::positive)
      out.push_back(classify_positive(p.rates, std::move(rec)));
    else
      out.push_back(classify_boundary(p.variant, std::move(rec), p.rates, t));
  }
  return out;
}

}  // namespace fcl
