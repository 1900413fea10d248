#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace fcl;
using namespace fcl::testing;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

nlohmann::json valid_doc() { return config_to_json(preset("fig4")); }

}  // namespace

TEST(Presets, AllParseAndMatchFixtures) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name)) << name;
  EXPECT_EQ(preset("fig4").rates, fig4_rates());
  EXPECT_EQ(preset("thm45-proof"), preset("fig5"));
  EXPECT_EQ(preset("fig5").rates, thm45_rates());
  EXPECT_EQ(preset("thm49-proof").rates, thm49_rates());
  EXPECT_EQ(preset("fig6-caption").rates, fig6_caption_rates());
  EXPECT_EQ(preset("fig-eec1c1").rates, eec1c1_rates());
  EXPECT_EQ(preset("fig7").network, Variant::EEC2C2);
  EXPECT_EQ(*preset("fig7").T_s, 19.5);
  EXPECT_THROW(preset("fig99"), ConfigError);
}

TEST(Config, NonPositiveRateNamesTheKey) {
  auto j = valid_doc();
  j["rates"]["k3_plus"] = 0;
  const auto e = errors_of(j.dump());
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0], "rate constant k3_plus must be a positive finite number");
}

TEST(Config, UnmodeledVariantRejected) {
  auto j = valid_doc();
  j["network"] = "EEFF";
  EXPECT_TRUE(any_contains(errors_of(j.dump()), "variant not modeled in this artifact: 'EEFF'"));
}

TEST(Config, CollectsEveryError) {
  auto j = valid_doc();
  j["rates"]["k1_minus"] = -1;
  j["rates"].erase("k2_cat");
  j["rates"]["k9_plus"] = 1;
  j["totals"]["T_e"] = 0;
  j["colour"] = "red";
  const auto e = errors_of(j.dump());
  EXPECT_GE(e.size(), 5u);
  EXPECT_TRUE(any_contains(e, "k1_minus"));
  EXPECT_TRUE(any_contains(e, "k2_cat"));
  EXPECT_TRUE(any_contains(e, "k9_plus"));
  EXPECT_TRUE(any_contains(e, "T_e"));
  EXPECT_TRUE(any_contains(e, "colour"));
}

TEST(Config, SingleSiteRejectsDualSiteKeys) {
  auto j = config_to_json(preset("fig3"));
  j["rates"]["k3_plus"] = 1;
  EXPECT_TRUE(any_contains(errors_of(j.dump()), "k3_plus"));
  EXPECT_FALSE(errors_of("[1,2]").empty());
  EXPECT_FALSE(errors_of("{not json").empty());
}

TEST(Config, NeedsTsOrSweep) {
  auto j = valid_doc();
  j["totals"].erase("T_s");
  j.erase("sweep");
  EXPECT_FALSE(errors_of(j.dump()).empty());
  j["sweep"] = {{"Ts_min", 1}, {"Ts_max", 2}};
  const auto cfg = parse_config(j.dump());
  EXPECT_FALSE(cfg.T_s.has_value());
  EXPECT_THROW(cfg.totals(), DomainError);
  EXPECT_EQ(cfg.sweep->points, 400);
}

TEST(Config, RoundTrip) {
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    EXPECT_EQ(parse_config(emit_config(cfg)), cfg) << name;
  }
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    ScenarioConfig cfg;
    cfg.network = kAllVariants[i % 5];
    cfg.rates = random_rates(rng);
    if (is_single_site(cfg.network))
      for (int l = 2; l < 4; ++l) cfg.rates.k_plus[l] = cfg.rates.k_minus[l] = cfg.rates.k_cat[l] = 1.0;
    const auto t = random_totals(rng);
    cfg.T_e = t.T_e;
    cfg.T_s = t.T_s;
    if (i % 2) cfg.sweep = SweepSpec{0.1, t.T_s * 2, 50 + i, i % 4 == 1 ? Spacing::log : Spacing::linear};
    cfg.options.seed = rng();
    cfg.options.rel_tol = log_uniform(rng, 1e-12, 1e-6);
    const auto back = parse_config(emit_config(cfg));
    EXPECT_EQ(back.network, cfg.network);
    EXPECT_EQ(back.T_e, cfg.T_e);
    EXPECT_EQ(back.T_s, cfg.T_s);
    EXPECT_EQ(back.sweep, cfg.sweep);
    EXPECT_EQ(back.options, cfg.options);
    for (int l = 0; l < edge_count(cfg.network); ++l) {
      EXPECT_EQ(back.rates.k_plus[l], cfg.rates.k_plus[l]);
      EXPECT_EQ(back.rates.k_minus[l], cfg.rates.k_minus[l]);
      EXPECT_EQ(back.rates.k_cat[l], cfg.rates.k_cat[l]);
    }
  }
}

TEST(Format, ShortestRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, d(rng) / 10.0) * (i % 2 ? -1 : 1);
    const auto s = format_double(x);
    EXPECT_EQ(std::stod(s), x);
    EXPECT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(StateVector::kAbsent), "");
}

TEST(Output, SweepCsvIsDeterministic) {
  const auto cfg = preset("fig5");
  const auto p = derive_params(cfg.rates, cfg.network);
  std::string first;
  for (const char* threads : {"1", "3"}) {
    ::setenv("FCL_THREADS", threads, 1);
    auto bs = sweep(p, cfg.T_e, cfg.sweep->grid());
    bs.events = detect_events(bs, p, thresholds(p, cfg.T_e));
    std::ostringstream os;
    write_branchset_csv(os, bs);
    if (first.empty())
      first = os.str();
    else
      EXPECT_EQ(os.str(), first);
  }
  ::unsetenv("FCL_THREADS");
  EXPECT_EQ(first.substr(0, first.find('\n')),
            "T_s,branch_id,kind,stability,u,s0,s1,s2,e,c1,c2,c3,c4,max_eig_real,rho");
}

TEST(Output, PlotDataAndJson) {
  const auto cfg = preset("fig3");
  const auto p = derive_params(cfg.rates, cfg.network);
  auto bs = sweep(p, cfg.T_e, make_grid(0.1, 1.0, 20, Spacing::linear));
  bs.events = detect_events(bs, p, thresholds(p, cfg.T_e));
  const auto dir = std::filesystem::temp_directory_path() / "fcl_plot_test";
  std::filesystem::remove_all(dir);
  write_plot_data(dir, bs);
  EXPECT_TRUE(std::filesystem::exists(dir / "plot_s0.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot_s1.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "plot_s2.csv"));
  std::ifstream in(dir / "plot_manifest.json");
  const auto manifest = nlohmann::json::parse(in);
  EXPECT_EQ(manifest["style"]["stable"], "solid");
  EXPECT_EQ(manifest["style"]["unstable"], "dashed");
  EXPECT_EQ(manifest["panels"].size(), 2u);
  const auto j = branchset_json(bs);
  EXPECT_EQ(j["events"].size(), 1u);
  EXPECT_EQ(j["events"][0]["type"], "transcritical");
  std::filesystem::remove_all(dir);
}

TEST(Output, SingleSiteThresholds) {
  const auto cfg = preset("fig3");
  const auto th = thresholds_json(thresholds(derive_params(cfg.rates, cfg.network), cfg.T_e));
  EXPECT_NEAR(th["single_site_onset"].get<double>(), 0.4444, 1e-4);
  EXPECT_FALSE(th.contains("dead_loss"));
}
