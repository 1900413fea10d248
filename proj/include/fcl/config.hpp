#pragma once

// Scenario configuration: JSON schema, exhaustive validation and the
// bundled named scenarios.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcl/bifurcation.hpp"
#include "fcl/network.hpp"

namespace fcl {

/// Carries every validation problem found, not just the first.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : ValidationError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const auto& x : e) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

struct SweepSpec {
  double Ts_min = 0.0;
  double Ts_max = 0.0;
  int points = 400;
  Spacing spacing = Spacing::linear;

  bool operator==(const SweepSpec&) const = default;
  std::vector<double> grid() const { return make_grid(Ts_min, Ts_max, points, spacing); }
};

struct RunOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::uint64_t seed = 1;
  int n_starts = 500;
  double t_end = 1000.0;
  std::string out = ".";

  bool operator==(const RunOptions&) const = default;
};

struct ScenarioConfig {
  Variant network = Variant::EEC2C1;
  RateConstants rates;
  double T_e = 0.0;
  std::optional<double> T_s;
  std::optional<SweepSpec> sweep;
  RunOptions options;

  bool operator==(const ScenarioConfig&) const = default;

  Totals totals() const {
    if (!T_s) throw DomainError("this command needs T_s (config totals.T_s or --Ts)");
    return {*T_s, T_e};
  }
};

inline std::string rate_key(int edge, std::string_view kind) {
  return "k" + std::to_string(edge + 1) + "_" + std::string(kind);
}

namespace detail {

inline bool positive_number(const nlohmann::json& j) {
  return j.is_number() && std::isfinite(j.get<double>()) && j.get<double>() > 0.0;
}

}  // namespace detail

inline ScenarioConfig parse_config(std::string_view text) {
  using nlohmann::json;
  std::vector<std::string> err;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});

  static const std::set<std::string> top_keys = {"network", "rates", "totals", "sweep", "options"};
  for (const auto& [key, _] : doc.items())
    if (!top_keys.count(key)) err.push_back("unknown key '" + key + "'");

  ScenarioConfig cfg;
  std::optional<Variant> variant;
  if (!doc.contains("network") || !doc["network"].is_string()) {
    err.push_back("missing string field 'network'");
  } else {
    const auto tag = doc["network"].get<std::string>();
    variant = parse_variant(tag);
    if (!variant)
      err.push_back("variant not modeled in this artifact: '" + tag + "'");
    else
      cfg.network = *variant;
  }

  if (!doc.contains("rates") || !doc["rates"].is_object()) {
    err.push_back("missing object 'rates'");
  } else if (variant) {
    const auto& r = doc["rates"];
    std::set<std::string> expected;
    for (int l = 0; l < edge_count(*variant); ++l)
      for (std::string_view kind : {"plus", "minus", "cat"}) {
        const std::string key = rate_key(l, kind);
        expected.insert(key);
        if (!r.contains(key)) {
          err.push_back("missing rate constant " + key);
          continue;
        }
        if (!detail::positive_number(r[key])) {
          err.push_back("rate constant " + key + " must be a positive finite number");
          continue;
        }
        const double val = r[key].get<double>();
        if (kind == "plus") cfg.rates.k_plus[l] = val;
        else if (kind == "minus") cfg.rates.k_minus[l] = val;
        else cfg.rates.k_cat[l] = val;
      }
    for (const auto& [key, _] : r.items())
      if (!expected.count(key))
        err.push_back("unexpected rate key " + key + " for " + std::string(to_string(*variant)));
  }

  if (!doc.contains("totals") || !doc["totals"].is_object()) {
    err.push_back("missing object 'totals'");
  } else {
    const auto& t = doc["totals"];
    for (const auto& [key, _] : t.items())
      if (key != "T_e" && key != "T_s") err.push_back("unknown totals key '" + key + "'");
    if (!t.contains("T_e") || !detail::positive_number(t["T_e"]))
      err.push_back("totals.T_e must be a positive finite number");
    else
      cfg.T_e = t["T_e"].get<double>();
    if (t.contains("T_s")) {
      if (!detail::positive_number(t["T_s"]))
        err.push_back("totals.T_s must be a positive finite number");
      else
        cfg.T_s = t["T_s"].get<double>();
    }
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    SweepSpec sw;
    bool ok = s.is_object();
    if (!ok) err.push_back("'sweep' must be an object");
    for (const char* key : {"Ts_min", "Ts_max"}) {
      if (!ok) break;
      if (!s.contains(key) || !detail::positive_number(s[key])) {
        err.push_back(std::string("sweep.") + key + " must be a positive finite number");
        ok = false;
      }
    }
    if (ok) {
      sw.Ts_min = s["Ts_min"].get<double>();
      sw.Ts_max = s["Ts_max"].get<double>();
      if (!(sw.Ts_max > sw.Ts_min)) {
        err.push_back("sweep.Ts_max must exceed sweep.Ts_min");
        ok = false;
      }
      if (s.contains("points")) {
        if (!s["points"].is_number_integer() || s["points"].get<long>() < 2) {
          err.push_back("sweep.points must be an integer >= 2");
          ok = false;
        } else {
          sw.points = s["points"].get<int>();
        }
      }
      if (s.contains("spacing")) {
        const auto sp = s["spacing"].is_string() ? s["spacing"].get<std::string>() : "";
        if (sp == "linear") sw.spacing = Spacing::linear;
        else if (sp == "log") sw.spacing = Spacing::log;
        else {
          err.push_back("sweep.spacing must be \"linear\" or \"log\"");
          ok = false;
        }
      }
      for (const auto& [key, _] : s.items())
        if (key != "Ts_min" && key != "Ts_max" && key != "points" && key != "spacing")
          err.push_back("unknown sweep key '" + key + "'");
    }
    if (ok) cfg.sweep = sw;
  }
  if (doc.contains("totals") && doc["totals"].is_object() && !doc["totals"].contains("T_s") &&
      !doc.contains("sweep"))
    err.push_back("config needs totals.T_s or a sweep block");

  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (!o.is_object()) {
      err.push_back("'options' must be an object");
    } else {
      for (const auto& [key, val] : o.items()) {
        if (key == "rel_tol" || key == "abs_tol" || key == "t_end") {
          if (!detail::positive_number(val)) {
            err.push_back("options." + key + " must be a positive finite number");
            continue;
          }
          (key == "rel_tol" ? cfg.options.rel_tol
                            : key == "abs_tol" ? cfg.options.abs_tol : cfg.options.t_end) = val.get<double>();
        } else if (key == "seed") {
          if (!val.is_number_unsigned()) err.push_back("options.seed must be a non-negative integer");
          else cfg.options.seed = val.get<std::uint64_t>();
        } else if (key == "n_starts") {
          if (!val.is_number_integer() || val.get<long>() < 100) err.push_back("options.n_starts must be an integer >= 100");
          else cfg.options.n_starts = val.get<int>();
        } else if (key == "out") {
          if (!val.is_string()) err.push_back("options.out must be a string");
          else cfg.options.out = val.get<std::string>();
        } else {
          err.push_back("unknown options key '" + key + "'");
        }
      }
    }
  }

  if (!err.empty()) throw ConfigError(std::move(err));
  return cfg;
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["network"] = std::string(to_string(cfg.network));
  for (int l = 0; l < edge_count(cfg.network); ++l) {
    j["rates"][rate_key(l, "plus")] = cfg.rates.k_plus[l];
    j["rates"][rate_key(l, "minus")] = cfg.rates.k_minus[l];
    j["rates"][rate_key(l, "cat")] = cfg.rates.k_cat[l];
  }
  j["totals"]["T_e"] = cfg.T_e;
  if (cfg.T_s) j["totals"]["T_s"] = *cfg.T_s;
  if (cfg.sweep) {
    j["sweep"] = {{"Ts_min", cfg.sweep->Ts_min},
                  {"Ts_max", cfg.sweep->Ts_max},
                  {"points", cfg.sweep->points},
                  {"spacing", cfg.sweep->spacing == Spacing::linear ? "linear" : "log"}};
  }
  const auto& o = cfg.options;
  j["options"] = {{"rel_tol", o.rel_tol}, {"abs_tol", o.abs_tol}, {"seed", o.seed},
                  {"n_starts", o.n_starts}, {"t_end", o.t_end}, {"out", o.out}};
  return j;
}

inline std::string emit_config(const ScenarioConfig& cfg) { return config_to_json(cfg).dump(2); }

// Named scenarios. T_s is the headline value of each; sweep ranges frame
// the features of each bifurcation diagram.
inline const std::map<std::string, std::string, std::less<>>& preset_texts() {
  static const std::map<std::string, std::string, std::less<>> presets = {
      {"fig3", R"({"network": "EC1",
        "rates": {"k1_plus": 2, "k1_minus": 1, "k1_cat": 1, "k2_plus": 3, "k2_minus": 0.5, "k2_cat": 1.5},
        "totals": {"T_e": 1, "T_s": 1},
        "sweep": {"Ts_min": 0.01, "Ts_max": 2, "points": 400, "spacing": "linear"}})"},
      {"fig4", R"({"network": "EEC2C1",
        "rates": {"k1_plus": 3.33, "k1_minus": 1.04, "k1_cat": 1.04, "k2_plus": 2, "k2_minus": 1, "k2_cat": 1,
                  "k3_plus": 1.3, "k3_minus": 1, "k3_cat": 1, "k4_plus": 1.08, "k4_minus": 2.15, "k4_cat": 1.25},
        "totals": {"T_e": 1.8, "T_s": 8},
        "sweep": {"Ts_min": 0.1, "Ts_max": 12, "points": 400, "spacing": "linear"}})"},
      {"fig5", R"({"network": "EEC2C1",
        "rates": {"k1_plus": 38.33, "k1_minus": 2.04, "k1_cat": 2.04, "k2_plus": 6, "k2_minus": 3, "k2_cat": 3,
                  "k3_plus": 6, "k3_minus": 1, "k3_cat": 1, "k4_plus": 4.08, "k4_minus": 8.15, "k4_cat": 8.15},
        "totals": {"T_e": 10.8, "T_s": 17},
        "sweep": {"Ts_min": 14, "Ts_max": 20, "points": 400, "spacing": "linear"}})"},
      {"fig6-caption", R"({"network": "EEC1C2",
        "rates": {"k1_plus": 1, "k1_minus": 1, "k1_cat": 0.036, "k2_plus": 1, "k2_minus": 11.13, "k2_cat": 1,
                  "k3_plus": 1, "k3_minus": 4886.7, "k3_cat": 1, "k4_plus": 1, "k4_minus": 1, "k4_cat": 0.976},
        "totals": {"T_e": 661, "T_s": 772.5},
        "sweep": {"Ts_min": 765, "Ts_max": 780, "points": 400, "spacing": "linear"}})"},
      {"thm49-proof", R"({"network": "EEC1C2",
        "rates": {"k1_plus": 645, "k1_minus": 2.2, "k1_cat": 2.2, "k2_plus": 76.8, "k2_minus": 4, "k2_cat": 4,
                  "k3_plus": 8, "k3_minus": 1, "k3_cat": 1, "k4_plus": 51, "k4_minus": 10.87, "k4_cat": 10.87},
        "totals": {"T_e": 12.45, "T_s": 772.5},
        "sweep": {"Ts_min": 10, "Ts_max": 30, "points": 400, "spacing": "linear"}})"},
      {"fig-eec1c1", R"({"network": "EEC1C1",
        "rates": {"k1_plus": 1370, "k1_minus": 2.7, "k1_cat": 2.7, "k2_plus": 214, "k2_minus": 1, "k2_cat": 1,
                  "k3_plus": 168, "k3_minus": 1, "k3_cat": 1, "k4_plus": 582.7, "k4_minus": 1.36, "k4_cat": 1.36},
        "totals": {"T_e": 0.06, "T_s": 0.105},
        "sweep": {"Ts_min": 0.09, "Ts_max": 0.2, "points": 400, "spacing": "linear"},
        "options": {"rel_tol": 1e-10}})"},
      {"fig7", R"({"network": "EEC2C2",
        "rates": {"k1_plus": 645, "k1_minus": 2.2, "k1_cat": 2.2, "k2_plus": 76.8, "k2_minus": 4, "k2_cat": 4,
                  "k3_plus": 8, "k3_minus": 1, "k3_cat": 1, "k4_plus": 51, "k4_minus": 10.87, "k4_cat": 10.87},
        "totals": {"T_e": 12.45, "T_s": 19.5},
        "sweep": {"Ts_min": 0.5, "Ts_max": 30, "points": 400, "spacing": "linear"}})"},
  };
  return presets;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : preset_texts()) names.push_back(name);
  names.push_back("thm45-proof");
  return names;
}

inline ScenarioConfig preset(std::string_view name) {
  if (name == "thm45-proof") name = "fig5";
  const auto& p = preset_texts();
  const auto it = p.find(name);
  if (it == p.end()) throw ConfigError({"unknown preset '" + std::string(name) + "'"});
  return parse_config(it->second);
}

}  // namespace fcl
