#pragma once

// Output formats: shortest round-trip CSV, JSON documents and plot data.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "fcl/bifurcation.hpp"
#include "fcl/dynamics.hpp"
#include "fcl/oracle.hpp"
#include "fcl/stability.hpp"
#include "fcl/steady_state.hpp"

namespace fcl {

/// Shortest decimal that reads back to the same double (at most 17
/// significant digits); NaN (an absent species) becomes an empty field.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline constexpr std::array<Species, 8> kCsvSpecies = {Species::s0, Species::s1, Species::s2, Species::e,
                                                       Species::c1, Species::c2, Species::c3, Species::c4};

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,s0,s1,s2,e,c1,c2,c3,c4\n";
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    os << format_double(tr.t[i]);
    for (Species s : kCsvSpecies) os << ',' << format_double(tr.states[i][s]);
    os << '\n';
  }
}

inline void write_branchset_csv(std::ostream& os, const BranchSet& bs) {
  os << "T_s,branch_id,kind,stability,u,s0,s1,s2,e,c1,c2,c3,c4,max_eig_real,rho\n";
  for (std::size_t i = 0; i < bs.grid.size(); ++i)
    for (const auto& b : bs.branches) {
      if (!b.present(i)) continue;
      const auto& r = *b.points[i];
      const auto diag = [&](const char* key) {
        const auto it = r.diagnostics.find(key);
        return it == r.diagnostics.end() ? std::string() : format_double(it->second);
      };
      os << format_double(bs.grid[i]) << ',' << b.id << ',' << to_string(r.kind) << ','
         << to_string(r.stability) << ',' << (r.u ? format_double(*r.u) : "");
      for (Species s : kCsvSpecies) os << ',' << format_double(r.coords[s]);
      os << ',' << diag("max_eig_real") << ',' << diag("rho") << '\n';
    }
}

inline nlohmann::json state_json(const StateVector& x) {
  nlohmann::json j = nlohmann::json::object();
  for (Species s : active_species(x.variant)) j[std::string(kSpeciesNames[static_cast<int>(s)])] = x[s];
  return j;
}

inline nlohmann::json record_json(const SteadyStateRecord& r) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(r.kind));
  j["stability"] = std::string(to_string(r.stability));
  if (r.u) j["u"] = *r.u;
  j["multiplicity"] = r.multiplicity;
  j["state"] = state_json(r.coords);
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline nlohmann::json records_json(const std::vector<SteadyStateRecord>& rs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rs) j.push_back(record_json(r));
  return j;
}

inline nlohmann::json thresholds_json(const Thresholds& th) {
  nlohmann::json j = nlohmann::json::object();
  if (th.dead_loss) j["dead_loss"] = *th.dead_loss;
  if (th.living_loss) j["living_loss"] = *th.living_loss;
  if (th.pss_onset) j["pss_onset"] = *th.pss_onset;
  if (th.single_site_onset) j["single_site_onset"] = *th.single_site_onset;
  return j;
}

inline nlohmann::json branchset_json(const BranchSet& bs) {
  nlohmann::json j;
  j["network"] = std::string(to_string(bs.variant));
  j["T_e"] = bs.T_e;
  j["grid"] = bs.grid;
  j["positive_count"] = bs.positive_count;
  j["degraded"] = nlohmann::json::array();
  for (std::size_t i = 0; i < bs.grid.size(); ++i)
    if (bs.degraded[i]) j["degraded"].push_back({{"T_s", bs.grid[i]}, {"reason", bs.degraded_reason[i]}});
  j["branches"] = nlohmann::json::array();
  for (const auto& b : bs.branches) {
    nlohmann::json jb{{"id", b.id}, {"kind", std::string(to_string(b.kind))}};
    jb["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < bs.grid.size(); ++i)
      if (b.present(i)) {
        auto r = record_json(*b.points[i]);
        r["T_s"] = bs.grid[i];
        jb["points"].push_back(std::move(r));
      }
    j["branches"].push_back(std::move(jb));
  }
  j["events"] = nlohmann::json::array();
  for (const auto& e : bs.events)
    j["events"].push_back({{"type", std::string(to_string(e.type))}, {"T_s", e.T_s}, {"branches", e.branches}});
  return j;
}

inline nlohmann::json oracle_json(const OracleReport& rep, const MatchReport& m) {
  nlohmann::json j;
  j["seed"] = rep.seed;
  j["starts_attempted"] = rep.starts_attempted;
  j["converged"] = rep.converged;
  j["failed"] = rep.failed;
  j["mean_iterations"] = rep.mean_iterations;
  j["found"] = nlohmann::json::array();
  for (std::size_t i = 0; i < rep.found.size(); ++i)
    j["found"].push_back({{"state", state_json(rep.found[i])}, {"hits", rep.hits[i]}});
  j["matched"] = m.matched.size();
  j["unmatched_oracle"] = m.unmatched_oracle;
  j["unmatched_reference"] = m.unmatched_reference;
  j["max_matched_distance"] = m.max_matched_distance;
  return j;
}

/// Per-panel series (s0, s1, s2 against T_s) and a declarative manifest:
/// stable branches solid, unstable dashed.
inline void write_plot_data(const std::filesystem::path& dir, const BranchSet& bs) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["x"] = "T_s";
  manifest["style"] = {{"stable", "solid"}, {"unstable", "dashed"}, {"marginal", "dotted"},
                       {"not-assessed", "dotted"}};
  manifest["color_by"] = "kind";
  manifest["panels"] = nlohmann::json::array();
  std::vector<Species> panels = {Species::s0, Species::s1};
  if (!is_single_site(bs.variant)) panels.push_back(Species::s2);
  for (Species s : panels) {
    const std::string name(kSpeciesNames[static_cast<int>(s)]);
    const std::string file = "plot_" + name + ".csv";
    std::ofstream os(dir / file);
    os << "T_s,branch_id,kind,stability," << name << '\n';
    for (const auto& b : bs.branches)
      for (std::size_t i = 0; i < bs.grid.size(); ++i)
        if (b.present(i))
          os << format_double(bs.grid[i]) << ',' << b.id << ',' << to_string(b.kind) << ','
             << to_string(b.points[i]->stability) << ',' << format_double(b.points[i]->coords[s]) << '\n';
    manifest["panels"].push_back({{"y", name}, {"file", file}, {"series_by", "branch_id"}});
  }
  std::ofstream(dir / "plot_manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace fcl
