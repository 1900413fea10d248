// fcl: command-line front end for the futile-cycle library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcl/fcl.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitMismatch = 3;

struct CommonArgs {
  std::string config_file;
  std::string preset_name;
  std::optional<double> Ts;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  auto* cfg = cmd->add_option("--config", a.config_file, "scenario JSON file");
  auto* pre = cmd->add_option("--preset", a.preset_name, "bundled scenario name");
  cfg->excludes(pre);
  cmd->add_option("--Ts", a.Ts, "total substrate (overrides the config)");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--points", a.points, "sweep grid points");
}

fcl::ScenarioConfig load(const CommonArgs& a) {
  fcl::ScenarioConfig cfg;
  if (!a.preset_name.empty()) {
    cfg = fcl::preset(a.preset_name);
  } else if (!a.config_file.empty()) {
    std::ifstream in(a.config_file);
    if (!in) throw fcl::ConfigError({"cannot read config file " + a.config_file});
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = fcl::parse_config(ss.str());
  } else {
    throw fcl::ConfigError({"one of --config or --preset is required"});
  }
  if (a.Ts) {
    if (!(*a.Ts > 0.0)) throw fcl::ConfigError({"--Ts must be positive"});
    cfg.T_s = *a.Ts;
  }
  if (a.out) cfg.options.out = *a.out;
  if (a.seed) cfg.options.seed = *a.seed;
  if (a.points) {
    if (*a.points < 2) throw fcl::ConfigError({"--points must be at least 2"});
    if (cfg.sweep) cfg.sweep->points = *a.points;
  }
  return cfg;
}

void emit(const CommonArgs& a, const fcl::ScenarioConfig& cfg, const std::string& name, const json& doc) {
  std::cout << doc.dump(2) << '\n';
  if (a.out) {
    std::filesystem::create_directories(cfg.options.out);
    std::ofstream(std::filesystem::path(cfg.options.out) / (name + ".json")) << doc.dump(2) << '\n';
  }
}

int cmd_analyze(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  const auto states = fcl::analyze(p, cfg.totals());
  json doc{{"network", std::string(fcl::to_string(cfg.network))},
           {"T_e", cfg.T_e},
           {"T_s", *cfg.T_s},
           {"states", fcl::records_json(states)}};
  emit(a, cfg, "analyze", doc);
  return kExitOk;
}

std::vector<double> sweep_grid(const fcl::ScenarioConfig& cfg, const CommonArgs& a) {
  if (cfg.sweep) return cfg.sweep->grid();
  if (cfg.T_s)
    return fcl::make_grid(0.5 * *cfg.T_s, 2.0 * *cfg.T_s, a.points.value_or(400), fcl::Spacing::linear);
  throw fcl::ConfigError({"sweep needs a sweep block or T_s"});
}

int cmd_sweep(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  auto bs = fcl::sweep(p, cfg.T_e, sweep_grid(cfg, a));
  bs.events = fcl::detect_events(bs, p, fcl::thresholds(p, cfg.T_e));
  const std::filesystem::path dir(cfg.options.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "branches.csv");
    fcl::write_branchset_csv(os, bs);
  }
  std::ofstream(dir / "branches.json") << fcl::branchset_json(bs).dump(2) << '\n';
  fcl::write_plot_data(dir, bs);
  std::size_t degraded = 0;
  for (bool d : bs.degraded) degraded += d;
  json summary{{"branches", bs.branches.size()}, {"events", json::array()}, {"degraded_points", degraded}};
  for (const auto& e : bs.events)
    summary["events"].push_back({{"type", std::string(fcl::to_string(e.type))}, {"T_s", e.T_s}});
  std::cout << summary.dump(2) << '\n';
  return degraded == bs.grid.size() ? kExitNumerical : kExitOk;
}

int cmd_simulate(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto t = cfg.totals();
  std::mt19937_64 rng(cfg.options.seed);
  const auto x0 = fcl::sample_compatibility_class(cfg.network, t, rng);
  fcl::IntegratorOptions opt;
  opt.rel_tol = cfg.options.rel_tol;
  opt.abs_tol = cfg.options.abs_tol;
  opt.record_interval = cfg.options.t_end / 2000.0;
  const auto tr = fcl::integrate(cfg.rates, x0, cfg.options.t_end, opt);
  const std::filesystem::path dir(cfg.options.out);
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "trajectory.csv");
    fcl::write_trajectory_csv(os, tr);
  }
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  const auto states = fcl::analyze(p, t);
  const auto match = fcl::match_steady_state(tr.final_state(), states);
  json doc{{"accepted_steps", tr.stats.accepted},
           {"rejected_steps", tr.stats.rejected},
           {"conservation_drift", tr.conservation_drift},
           {"final_residual", tr.final_residual},
           {"final_state", fcl::state_json(tr.final_state())}};
  doc["matched_steady_state"] = match ? fcl::record_json(states[*match]) : json(nullptr);
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_thresholds(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  json doc = fcl::thresholds_json(fcl::thresholds(p, cfg.T_e));
  json acr = json::object();
  for (const auto& pred : fcl::acr_predictions(p)) acr[pred.quantity] = pred.value;
  doc["acr"] = acr;
  if (cfg.network == fcl::Variant::EEC2C1) {
    const auto v = fcl::multistationarity_precluded(p, cfg.T_e);
    doc["multistationarity_precluded"] = {{"precluded", v.precluded}, {"reason", v.reason}};
  }
  if (cfg.network == fcl::Variant::EEC1C2) {
    const auto w = fcl::four_pss_window(p, cfg.T_e);
    doc["four_pss_window"] = w ? json::array({w->first, w->second}) : json(nullptr);
  }
  emit(a, cfg, "thresholds", doc);
  return kExitOk;
}

int cmd_verify_acr(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  const std::vector<double> Te_values = {0.5 * cfg.T_e, cfg.T_e, 2.0 * cfg.T_e};
  const auto Ts_values = sweep_grid(cfg, a);
  const auto checks = fcl::verify_acr(p, Te_values, Ts_values);
  bool ok = true;
  json doc{{"tolerance", 1e-8}, {"checks", json::array()}};
  for (const auto& c : checks) {
    const bool pass = c.max_relative_deviation <= 1e-8;
    ok = ok && pass;
    doc["checks"].push_back({{"quantity", c.quantity},
                             {"predicted", c.predicted},
                             {"max_relative_deviation", c.max_relative_deviation},
                             {"samples", c.samples},
                             {"pass", pass}});
  }
  doc["pass"] = ok;
  emit(a, cfg, "verify-acr", doc);
  return ok ? kExitOk : kExitMismatch;
}

int cmd_oracle_check(const CommonArgs& a) {
  const auto cfg = load(a);
  const auto t = cfg.totals();
  const auto p = fcl::derive_params(cfg.rates, cfg.network);
  fcl::OracleOptions opt;
  opt.n_starts = cfg.options.n_starts;
  opt.seed = cfg.options.seed;
  const auto rep = fcl::brute_force_steady_states(cfg.network, cfg.rates, t, opt);
  const auto reference = fcl::all_steady_states(p, t);
  const auto m = fcl::compare_sets(rep, reference, 1e-6);
  json doc = fcl::oracle_json(rep, m);
  const bool capacity_ok = rep.positive_count() <= fcl::positive_capacity(cfg.network);
  doc["capacity_ok"] = capacity_ok;
  doc["pass"] = m.ok() && capacity_ok;
  emit(a, cfg, "oracle-check", doc);
  return m.ok() && capacity_ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states, stability and bifurcations of bifunctional-enzyme futile cycles"};
  app.require_subcommand(1);
  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;
  const auto reg = [&](const char* name, const char* help, int (*fn)(const CommonArgs&)) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, args);
    cmd->callback([&handler, fn] { handler = fn; });
  };
  reg("analyze", "all steady states with stability at one (T_e, T_s)", cmd_analyze);
  reg("sweep", "branches and events over a T_s grid", cmd_sweep);
  reg("simulate", "integrate from a random point of the compatibility class", cmd_simulate);
  reg("thresholds", "closed-form thresholds and ACR values", cmd_thresholds);
  reg("verify-acr", "ACR flatness over a (T_e, T_s) grid", cmd_verify_acr);
  reg("oracle-check", "compare the polynomial pipeline with multistart Newton", cmd_oracle_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    return handler(args);
  } catch (const fcl::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "error: " << msg << '\n';
    return kExitValidation;
  } catch (const fcl::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fcl::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fcl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
