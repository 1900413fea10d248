#pragma once

// Network variants, kinetic constants, derived parameters and species state
// for the single-site (E,C1) and dual-site (E,E,E2,E1) bifunctional futile
// cycles.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fcl {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::vector<double> diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<double>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<double> diagnostics_;
};

/// Tag (E,E,X,Y): X is the enzyme of S2->S1, Y the enzyme of S1->S0.
enum class Variant { EC1, EEC2C1, EEC1C1, EEC1C2, EEC2C2 };

inline constexpr std::array<Variant, 5> kAllVariants = {
    Variant::EC1, Variant::EEC2C1, Variant::EEC1C1, Variant::EEC1C2, Variant::EEC2C2};
inline constexpr std::array<Variant, 4> kDualSiteVariants = {
    Variant::EEC2C1, Variant::EEC1C1, Variant::EEC1C2, Variant::EEC2C2};

inline constexpr bool is_single_site(Variant v) noexcept { return v == Variant::EC1; }
inline constexpr int edge_count(Variant v) noexcept { return is_single_site(v) ? 2 : 4; }
inline constexpr int species_count(Variant v) noexcept { return is_single_site(v) ? 5 : 8; }

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::EC1: return "EC1";
    case Variant::EEC2C1: return "EEC2C1";
    case Variant::EEC1C1: return "EEC1C1";
    case Variant::EEC1C2: return "EEC1C2";
    case Variant::EEC2C2: return "EEC2C2";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : kAllVariants)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

/// Storage slots of StateVector; also the canonical dual-site species order.
enum class Species { s0 = 0, s1, s2, e, c1, c2, c3, c4 };

inline constexpr std::array<std::string_view, 8> kSpeciesNames = {"s0", "s1", "s2", "e",
                                                                 "c1", "c2", "c3", "c4"};

/// Species present in a variant, in the order used for dense vectors.
inline std::vector<Species> active_species(Variant v) {
  if (is_single_site(v)) return {Species::s0, Species::s1, Species::e, Species::c1, Species::c2};
  return {Species::s0, Species::s1, Species::s2, Species::e,
          Species::c1, Species::c2, Species::c3, Species::c4};
}

/// Position of a species in the dense vector of a variant, or -1 when absent.
inline int dense_index(Variant v, Species s) {
  const auto list = active_species(v);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i] == s) return static_cast<int>(i);
  return -1;
}

struct RateConstants {
  std::array<double, 4> k_plus{};
  std::array<double, 4> k_minus{};
  std::array<double, 4> k_cat{};

  /// Throws ValidationError naming the first non-positive or non-finite constant.
  void validate(Variant v) const {
    for (int l = 0; l < edge_count(v); ++l) {
      const auto check = [&](double x, const char* suffix) {
        if (!(x > 0.0) || !std::isfinite(x))
          throw ValidationError("rate constant k" + std::to_string(l + 1) + "_" + suffix +
                                " must be positive (got " + std::to_string(x) + ")");
      };
      check(k_plus[l], "plus");
      check(k_minus[l], "minus");
      check(k_cat[l], "cat");
    }
  }

  /// k* = k_cat k_plus / (k_cat + k_minus); `l` is zero-based.
  double k_star(int l) const { return k_cat[l] * k_plus[l] / (k_cat[l] + k_minus[l]); }

  bool operator==(const RateConstants&) const = default;

  static RateConstants all_ones() {
    RateConstants k;
    k.k_plus.fill(1.0);
    k.k_minus.fill(1.0);
    k.k_cat.fill(1.0);
    return k;
  }
};

/// Effective constants of the steady-state parameterization.
///
/// For dual-site variants every field is populated. For EC1 only `k_star[0..1]`
/// are meaningful; the dual-site ratios are NaN.
struct DerivedParams {
  Variant variant = Variant::EEC2C1;
  RateConstants rates;
  std::array<double, 4> k_star{};
  double gamma = 0, alpha0 = 0, alpha1 = 0, alpha2 = 0;
  double beta3 = 0, beta4 = 0;
  double a3 = 0, a4 = 0, b3 = 0, b4 = 0;
};

inline DerivedParams derive_params(const RateConstants& k, Variant v) {
  k.validate(v);
  DerivedParams p;
  p.variant = v;
  p.rates = k;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  p.k_star.fill(nan);
  for (int l = 0; l < edge_count(v); ++l) p.k_star[l] = k.k_star(l);
  if (is_single_site(v)) {
    p.gamma = p.alpha0 = p.alpha1 = p.alpha2 = nan;
    p.beta3 = p.beta4 = p.a3 = p.a4 = p.b3 = p.b4 = nan;
    return p;
  }
  const double k1 = k.k_cat[0], k2 = k.k_cat[1], k3 = k.k_cat[2], k4 = k.k_cat[3];
  const auto& ks = p.k_star;
  p.gamma = (k2 / k1) * (ks[3] / ks[1]);
  p.alpha0 = (k1 / ks[0]) * (k1 / k2) * (ks[1] / ks[3]);
  p.alpha1 = k1 / ks[3];
  p.alpha2 = k2 / ks[2];
  p.beta4 = k1 / k4;
  p.beta3 = k2 / k3;
  p.a3 = 1.0 + p.beta3;
  p.a4 = 1.0 + p.beta4;
  p.b3 = 1.0 + 2.0 * p.beta3;
  p.b4 = 1.0 + 2.0 * p.beta4;
  return p;
}

/// Concentrations of all species. Slots a variant does not carry hold NaN
/// (structural absence), never zero.
struct StateVector {
  Variant variant = Variant::EEC2C1;
  std::array<double, 8> x{};

  static constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

  StateVector() = default;
  explicit StateVector(Variant v) : variant(v) {
    x.fill(0.0);
    if (is_single_site(v)) {
      x[static_cast<int>(Species::s2)] = kAbsent;
      x[static_cast<int>(Species::c3)] = kAbsent;
      x[static_cast<int>(Species::c4)] = kAbsent;
    }
  }

  double& operator[](Species s) { return x[static_cast<int>(s)]; }
  double operator[](Species s) const { return x[static_cast<int>(s)]; }
  bool has(Species s) const { return !std::isnan((*this)[s]); }

  Eigen::VectorXd dense() const {
    const auto list = active_species(variant);
    Eigen::VectorXd out(static_cast<Eigen::Index>(list.size()));
    for (std::size_t i = 0; i < list.size(); ++i) out[static_cast<Eigen::Index>(i)] = (*this)[list[i]];
    return out;
  }

  static StateVector from_dense(Variant v, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const auto list = active_species(v);
    if (y.size() != static_cast<Eigen::Index>(list.size()))
      throw DomainError("state dimension does not match variant " + std::string(to_string(v)));
    StateVector s(v);
    for (std::size_t i = 0; i < list.size(); ++i) s[list[i]] = y[static_cast<Eigen::Index>(i)];
    return s;
  }

  bool non_negative() const {
    for (Species s : active_species(variant))
      if (!((*this)[s] >= 0.0)) return false;
    return true;
  }

  bool strictly_positive() const {
    for (Species s : active_species(variant))
      if (!((*this)[s] > 0.0)) return false;
    return true;
  }
};

struct Totals {
  double T_s = 0.0;
  double T_e = 0.0;

  bool operator==(const Totals&) const = default;
};

/// Weights of the substrate and enzyme conservation laws over the dense species.
inline Eigen::VectorXd substrate_weights(Variant v) {
  if (is_single_site(v)) return (Eigen::VectorXd(5) << 1, 1, 0, 1, 2).finished();
  return (Eigen::VectorXd(8) << 1, 1, 1, 0, 1, 1, 2, 2).finished();
}

inline Eigen::VectorXd enzyme_weights(Variant v) {
  if (is_single_site(v)) return (Eigen::VectorXd(5) << 0, 0, 1, 1, 1).finished();
  return (Eigen::VectorXd(8) << 0, 0, 0, 1, 1, 1, 1, 1).finished();
}

inline Totals conserved_totals(const StateVector& x) {
  if (!x.non_negative()) throw ValidationError("state has a negative coordinate");
  const Eigen::VectorXd y = x.dense();
  return {substrate_weights(x.variant).dot(y), enzyme_weights(x.variant).dot(y)};
}

struct Selectors {
  double v1, v2, w2;
};

/// (v1, v2, w2) with v1 = c1/E1, v2 = c2/E2 and w2 = u v2 at u = c1/c2.
inline Selectors variant_selectors(Variant v, double u) {
  if (!(u > 0.0)) throw DomainError("variant_selectors requires u > 0");
  switch (v) {
    case Variant::EEC2C1: return {1.0, 1.0, u};
    case Variant::EEC1C1: return {1.0, 1.0 / u, 1.0};
    case Variant::EEC1C2: return {u, 1.0 / u, 1.0};
    case Variant::EEC2C2: return {u, 1.0, u};
    case Variant::EC1: break;
  }
  throw DomainError("variant_selectors is defined for dual-site variants only");
}

/// One Henri-Michaelis-Menten edge: tail + enzyme <-> complex -> head + enzyme.
struct EdgeSpec {
  int index;         // zero-based edge index
  Species tail;      // substrate consumed
  Species head;      // substrate produced
  Species enzyme;    // E, C1 or C2
  Species complex_;  // intermediate compound of this edge
};

inline std::vector<EdgeSpec> edges(Variant v) {
  using S = Species;
  if (is_single_site(v)) return {{0, S::s0, S::s1, S::e, S::c1}, {1, S::s1, S::s0, S::c1, S::c2}};
  const S e2 = (v == Variant::EEC2C1 || v == Variant::EEC2C2) ? S::c2 : S::c1;
  const S e1 = (v == Variant::EEC2C1 || v == Variant::EEC1C1) ? S::c1 : S::c2;
  return {{0, S::s0, S::s1, S::e, S::c1},
          {1, S::s1, S::s2, S::e, S::c2},
          {2, S::s2, S::s1, e2, S::c3},
          {3, S::s1, S::s0, e1, S::c4}};
}

}  // namespace fcl
