#pragma once

// Reference quantities pinned in tests/expectations.json. The regression test
// and the pin-expectations tool both compute them through this header.

#include <filesystem>
#include <string>

#include "anderson_lab/cli.hpp"

namespace anderson_lab::pinned {

inline Config scenario_config(const std::filesystem::path& scenarios, const std::string& name) {
  return load_config_file(scenarios / (name + ".json"));
}

inline json entry(const Config& cfg, const std::string& command, double value, double ci) {
  return {{"scenario", cfg.scenario.id}, {"seed", cfg.scenario.seed}, {"command", command},
          {"value", value},              {"ci", ci}};
}

/// Every pinned quantity keyed by name; ci is a 3-stderr half-width, or 0
/// for deterministic quantities.
inline json compute(const std::filesystem::path& scenarios) {
  json out = json::object();

  const auto bern = scenario_config(scenarios, "bernoulli");
  {
    const auto r = cli::run_lyapunov(bern);
    const auto& t = r.tables.front();
    for (const auto& row : t.rows) {
      const double e = parse_double(row[t.column("energy")]);
      out["bernoulli_gamma_E" + format_double(e)] =
          entry(bern, "lyapunov", parse_double(row[t.column("gamma_hat")]),
                stats::kSigmas * parse_double(row[t.column("gamma_stderr")]));
    }
  }
  for (const auto* name : {"bernoulli", "bumps"}) {
    const auto cfg = scenario_config(scenarios, name);
    const auto loc = cli::run_localize(cfg);
    out[std::string(name) + "_nu"] = entry(cfg, "localize", loc.summary["nu"].get<double>(), 0.0);
    for (const auto& [law, s] : loc.summary["runs"].items()) {
      const auto states = s["states"].get<std::size_t>();
      const double p = s["pass_fraction"].get<double>();
      const auto count = static_cast<std::size_t>(std::lround(p * static_cast<double>(states)));
      out[std::string(name) + "_pass_fraction_" + law] =
          entry(cfg, "localize", p, stats::kSigmas * stats::proportion(count, states).se);
    }
    const auto census = cli::run_census(cfg);
    for (const auto& [law, s] : census.summary["runs"].items())
      out[std::string(name) + "_last_singular_n_" + law] =
          entry(cfg, "census", s["last_singular_n"].get<double>(), 0.0);
  }

  const auto cs = scenario_config(scenarios, "craig_simon");
  out["craig_simon_worst_excess"] = entry(cs, "craig-simon", cli::run_craig_simon(cs).summary["worst"].get<double>(), 0.0);

  const auto pareto = scenario_config(scenarios, "pareto");
  {
    const auto r = cli::run_edge(pareto);
    const auto& t = r.tables.front();
    for (const auto& row : t.rows) {
      const auto n = row[t.column("n")];
      if (n != "2" && n != "16" && n != "128") continue;
      out["pareto_edge_frequency_n" + n] = entry(pareto, "edge-census", parse_double(row[t.column("frequency")]),
                                                 stats::kSigmas * parse_double(row[t.column("frequency_stderr")]));
    }
    out["pareto_late_violation_fraction"] =
        entry(pareto, "edge-census", r.summary["late_violation_fraction"].get<double>(), 0.0);
  }
  return out;
}

}  // namespace anderson_lab::pinned
