#pragma once

// Command-line front end: flags, subcommand dispatch, expectation checks.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anderson_lab/config.hpp"
#include "anderson_lab/estimators.hpp"
#include "anderson_lab/experiments.hpp"
#include "anderson_lab/persist.hpp"
#include "anderson_lab/spectral.hpp"

namespace anderson_lab {

enum ExitStatus : int { kOk = 0, kValidation = 1, kRuntime = 2, kAssertFailed = 3 };

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<Table> tables;  // the first one goes to standard output
  json summary = json::object();
  std::vector<Check> checks;
};

namespace cli {

inline std::string law_str(const ProductLaw& law) { return std::string(law_name(law.tag())); }

/// The laws a paired experiment runs: P1 alone, or P1 then P0 when the
/// config carries non-identity densities.
inline std::vector<Scenario> paired_scenarios(const Config& cfg) {
  if (cfg.densities.is_identity()) return {cfg.scenario};
  return {cfg.scenario.with_law(ProductLaw::exact(cfg.densities.base())),
          cfg.scenario.with_law(ProductLaw::approximate(cfg.densities))};
}

inline void check_flag(const Config& cfg, RunResult& out, const std::string& key, bool value, std::string detail) {
  if (!cfg.expect.contains(key)) return;
  const bool want = cfg.expect[key].get<bool>();
  out.checks.push_back({key, value == want, std::move(detail)});
}

inline RunResult run_lyapunov(const Config& cfg) {
  const auto& sc = cfg.scenario;
  const auto& ex = cfg.experiment;
  RunResult out;
  Table t{"lyapunov",
          {"scenario_id", "seed", "law_tag", "energy", "energy_imag", "n", "samples", "gamma_hat", "gamma_stderr",
           "closed_form"},
          {}};
  const auto* atoms = sc.law.base().atoms();
  const bool constant = atoms && atoms->weights.size() == 1;
  double worst_closed = 0.0;
  bool positive = true;
  std::vector<LyapunovEstimate> rows;
  for (std::size_t k = 0; k < ex.energies.size(); ++k) {
    const Energy e = ex.energy_imag == 0.0 ? Energy(ex.energies[k]) : Energy(cplx(ex.energies[k], ex.energy_imag));
    const auto est = lyapunov_mc(sc.law, e, ex.n, sc.samples, RngStream{sc.seed, stream_tag::kLyapunov}.child(k),
                                 {sc.workers, ex.burn_in});
    const double closed = constant ? lyapunov_closed_form(atoms->locations[0], e) : std::numeric_limits<double>::quiet_NaN();
    if (constant) worst_closed = std::max(worst_closed, std::abs(est.mean - closed));
    positive = positive && est.mean > stats::kSigmas * est.se;
    t.add({sc.id, std::to_string(sc.seed), law_str(sc.law), format_double(e.z.real()), format_double(e.z.imag()),
           std::to_string(ex.n), std::to_string(sc.samples), format_double(est.mean), format_double(est.se),
           format_double(closed)});
    rows.push_back(est);
  }
  out.summary = {{"rows", rows.size()}, {"max_closed_form_error", constant ? json(worst_closed) : json(nullptr)}};
  if (cfg.expect.contains("closed_form_tol")) {
    const double tol = cfg.expect["closed_form_tol"].get<double>();
    out.checks.push_back({"closed_form_tol", constant && worst_closed <= tol,
                          constant ? "max |gamma_hat - closed form| = " + format_double(worst_closed)
                                   : "no closed form for a non-constant potential"});
  }
  if (cfg.expect.contains("lyapunov_mean")) {
    const double want = cfg.expect["lyapunov_mean"]["value"].get<double>();
    const double tol = cfg.expect["lyapunov_mean"]["tol"].get<double>();
    out.checks.push_back({"lyapunov_mean", std::abs(rows.front().mean - want) <= tol,
                          "gamma_hat = " + format_double(rows.front().mean) + ", pinned " + format_double(want)});
  }
  check_flag(cfg, out, "gamma_positive", positive, "every gamma_hat > 3 stderr");
  out.tables.push_back(std::move(t));
  return out;
}

inline TailOptions tail_options(const Config& cfg) {
  TailOptions opt;
  opt.workers = cfg.scenario.workers;
  opt.statistic = cfg.experiment.statistic;
  opt.gamma_samples = cfg.scenario.gamma_samples;
  opt.epsilon_relative = cfg.experiment.epsilon_relative;
  return opt;
}

inline void add_curve_rows(Table& t, const std::string& id, std::uint64_t seed, const LDECurve& c) {
  for (std::size_t g = 0; g < c.n_grid.size(); ++g)
    t.add({id, std::to_string(seed), std::string(law_name(c.law)), format_double(c.energy.real()),
           std::string(statistic_name(c.statistic)), std::to_string(c.n_grid[g]),
           std::to_string(2 * c.n_grid[g] + 1), std::to_string(c.samples), std::to_string(c.counts[g]),
           format_double(c.p[g]), format_double(c.p_se[g])});
}

inline std::vector<std::string> fit_row(const std::string& id, std::uint64_t seed, const LDECurve& c) {
  return {id, std::to_string(seed), std::string(law_name(c.law)), format_double(c.energy.real()),
          format_double(c.epsilon), format_double(c.epsilon_eff), format_double(c.gamma), format_double(c.gamma_se),
          c.fit.status, format_double(c.fit.eta), format_double(c.fit.ci), std::to_string(c.fit.points)};
}

inline const std::vector<std::string> kCurveColumns = {"scenario_id", "seed", "law_tag", "energy", "statistic", "n",
                                                       "length", "samples", "count", "p", "p_stderr"};
inline const std::vector<std::string> kFitColumns = {"scenario_id", "seed", "law_tag", "energy", "epsilon",
                                                     "epsilon_eff", "gamma_hat", "gamma_stderr", "status", "eta",
                                                     "ci", "points"};

inline RunResult run_lde(const Config& cfg) {
  const auto& sc = cfg.scenario;
  RunResult out;
  Table curve{"lde", kCurveColumns, {}}, fits{"lde_fit", kFitColumns, {}};
  bool positive = true;
  for (std::size_t k = 0; k < cfg.experiment.energies.size(); ++k) {
    const auto c = lde_curve(sc.law, cfg.experiment.energies[k], cfg.experiment.epsilon, sc.n_grid, sc.samples,
                             RngStream{sc.seed, 0}.child(k), tail_options(cfg));
    add_curve_rows(curve, sc.id, sc.seed, c);
    fits.add(fit_row(sc.id, sc.seed, c));
    const double lower = c.fit.status == "fitted" ? c.fit.eta - c.fit.ci : c.fit.eta;
    positive = positive && c.fit.status != "insufficient" && lower > 0.0;
  }
  check_flag(cfg, out, "eta_positive", positive, "eta - CI > 0 at every energy");
  out.tables = {std::move(curve), std::move(fits)};
  return out;
}

inline RunResult run_lift(const Config& cfg) {
  const auto& sc = cfg.scenario;
  RunResult out;
  Table lift{"lift",
             {"scenario_id", "seed", "energy", "n", "p1", "p1_stderr", "p0", "p0_stderr", "log_bound", "bound",
              "violation"},
             {}};
  Table rate{"lift_rate",
             {"scenario_id", "seed", "energy", "eta_p1", "ci_p1", "status_p1", "eta_p0", "ci_p0", "status_p0", "eta0",
              "rate_check", "rate_margin"},
             {}};
  std::size_t violations = 0;
  bool rates_pass = true;
  for (std::size_t k = 0; k < cfg.experiment.energies.size(); ++k) {
    const double e = cfg.experiment.energies[k];
    const auto rep = lift_check(cfg.densities, e, cfg.experiment.epsilon, sc.n_grid, sc.samples,
                                RngStream{sc.seed, 0}.child(k), tail_options(cfg));
    for (std::size_t g = 0; g < sc.n_grid.size(); ++g) {
      const double c = std::exp(rep.log_bound[g]);
      const double bound = c * rep.exact.p[g] + stats::kSigmas * std::hypot(rep.approx.p_se[g], c * rep.exact.p_se[g]);
      const bool bad = rep.approx.p[g] > bound;
      lift.add({sc.id, std::to_string(sc.seed), format_double(e), std::to_string(sc.n_grid[g]),
                format_double(rep.exact.p[g]), format_double(rep.exact.p_se[g]), format_double(rep.approx.p[g]),
                format_double(rep.approx.p_se[g]), format_double(rep.log_bound[g]), format_double(bound),
                format_bool(bad)});
    }
    violations += rep.violations.size();
    rates_pass = rates_pass && rep.rate_check == "pass";
    rate.add({sc.id, std::to_string(sc.seed), format_double(e), format_double(rep.exact.fit.eta),
              format_double(rep.exact.fit.ci), rep.exact.fit.status, format_double(rep.approx.fit.eta),
              format_double(rep.approx.fit.ci), rep.approx.fit.status, format_double(rep.eta0), rep.rate_check,
              format_double(rep.rate_margin)});
  }
  out.summary = {{"violations", violations}, {"rate_checks_pass", rates_pass}};
  check_flag(cfg, out, "no_violations", violations == 0, std::to_string(violations) + " bound violations");
  check_flag(cfg, out, "rate_check_pass", rates_pass, "eta(P0) >= eta(P1) - eta0 - CI at every energy");
  out.tables = {std::move(lift), std::move(rate)};
  return out;
}

inline RunResult run_conditions(const Config& cfg) {
  RunResult out;
  const auto rep = condition_report(cfg.densities, cfg.experiment.conditions_n_max, cfg.experiment.conditions_k_max);
  Table t{"conditions", {"scenario_id", "condition", "n_max", "tested_value", "slope", "raw_verdict", "verdict"}, {}};
  for (const auto* c : {&rep.logmom, &rep.logmomunif, &rep.logsum}) {
    t.add({cfg.scenario.id, c->name, std::to_string(cfg.experiment.conditions_n_max), format_double(c->tested_value),
           format_double(c->slope), std::string(verdict_name(c->raw)), std::string(verdict_name(c->verdict))});
    out.summary[c->name] = verdict_name(c->verdict);
  }
  if (cfg.expect.contains("verdicts")) {
    for (const auto& [name, want] : cfg.expect["verdicts"].items()) {
      const auto& c = name == "logmom" ? rep.logmom : name == "logmomunif" ? rep.logmomunif : rep.logsum;
      const std::string got{verdict_name(c.verdict)};
      out.checks.push_back({"verdicts/" + name, got == want.get<std::string>(), name + " = " + got});
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

inline RunResult run_localize(const Config& cfg) {
  RunResult out;
  const auto runs = paired_scenarios(cfg);
  const auto nu = nu_inf(runs.front());
  Table t{"localization", {}, {}}, gamma;
  std::vector<double> fractions;
  json per_law = json::object();
  for (const auto& sc : runs) {
    const auto rep = run_localization(sc, nu);
    auto part = localization_table(rep);
    if (t.columns.empty()) t.columns = part.columns;
    for (auto& row : part.rows) t.add(std::move(row));
    fractions.push_back(rep.pass_fraction());
    per_law[law_str(sc.law)] = localization_summary(rep);
    if (gamma.columns.empty()) gamma = gamma_table(sc.id, sc.seed, rep.nu.gamma);
  }
  out.summary = {{"runs", per_law}, {"nu", nu.nu}, {"nu_warning", nu.warning}};
  if (cfg.expect.contains("pass_fraction_min")) {
    const double lo = cfg.expect["pass_fraction_min"].get<double>();
    for (std::size_t i = 0; i < runs.size(); ++i)
      out.checks.push_back({"pass_fraction_min/" + law_str(runs[i].law), fractions[i] >= lo,
                            "pass fraction " + format_double(fractions[i])});
  }
  if (cfg.expect.contains("paired_gap_max") && fractions.size() == 2) {
    const double gap = std::abs(fractions[1] - fractions[0]);
    out.checks.push_back({"paired_gap_max", gap <= cfg.expect["paired_gap_max"].get<double>(),
                          "|pass(P0) - pass(P1)| = " + format_double(gap)});
  }
  check_flag(cfg, out, "nu_positive", nu.nu > 0.0 && !nu.warning, "nu_I = " + format_double(nu.nu));
  out.tables = {std::move(t), std::move(gamma)};
  return out;
}

/// First grid n from which every later grid point has no singular site.
inline std::int64_t zero_from(const CensusReport& r, const std::vector<std::int64_t>& grid) {
  const auto last = r.last_singular_n();
  for (auto n : grid)
    if (n > last) return n;
  return grid.back() + 1;
}

inline RunResult run_census(const Config& cfg) {
  RunResult out;
  const auto runs = paired_scenarios(cfg);
  const auto nu = nu_inf(runs.front());
  Table t{"census", {}, {}};
  std::vector<std::int64_t> last, from;
  json per_law = json::object();
  for (const auto& sc : runs) {
    const auto rep = singularity_census(sc, nu);
    auto part = census_table(rep);
    if (t.columns.empty()) t.columns = part.columns;
    for (auto& row : part.rows) t.add(std::move(row));
    last.push_back(rep.last_singular_n());
    from.push_back(zero_from(rep, sc.n_grid));
    auto s = census_summary(rep);
    s["zero_from"] = from.back();
    per_law[law_str(sc.law)] = s;
  }
  out.summary = {{"runs", per_law}, {"nu", nu.nu}};
  if (cfg.expect.contains("last_singular_n_below")) {
    const auto bound = cfg.expect["last_singular_n_below"].get<std::int64_t>();
    for (std::size_t i = 0; i < runs.size(); ++i)
      out.checks.push_back({"last_singular_n_below/" + law_str(runs[i].law), last[i] < bound,
                            "last singular n = " + std::to_string(last[i])});
  }
  if (cfg.expect.contains("paired_ratio_max") && from.size() == 2) {
    const double ratio = cfg.expect["paired_ratio_max"].get<double>();
    out.checks.push_back({"paired_ratio_max", static_cast<double>(from[1]) <= ratio * static_cast<double>(from[0]),
                          "zero from n = " + std::to_string(from[1]) + " (P0) vs " + std::to_string(from[0]) + " (P1)"});
  }
  out.tables.push_back(std::move(t));
  return out;
}

inline RunResult run_edge(const Config& cfg) {
  RunResult out;
  const auto& sc = cfg.scenario;
  const auto rep = edge_bound_census(sc, sc.edge_p, sc.edge_r);
  const bool within = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.within_3se; });
  const bool below = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.below_bound; });
  out.summary = edge_summary(rep);
  check_flag(cfg, out, "within_3se", within, "frequency within 3 stderr of the exact tail probability at every n");
  check_flag(cfg, out, "below_bound", below, "frequency <= Chebyshev bound + 3 stderr at every n");
  check_flag(cfg, out, "violations_stop", rep.violations_stop,
             "late violation fraction " + format_double(rep.late_violation_fraction));
  out.tables.push_back(edge_table(rep));
  return out;
}

inline RunResult run_craig_simon(const Config& cfg) {
  RunResult out;
  const auto& sc = cfg.scenario;
  const auto n = cfg.experiment.n;
  const auto& energies = cfg.experiment.energies;
  const auto gammas = lyapunov_grid(sc.law.exact_counterpart(), energies, sc.gamma_length, sc.gamma_samples,
                                    {sc.seed, stream_tag::kLyapunov}, {sc.workers, cfg.experiment.burn_in});
  std::vector<double> gh;
  for (const auto& g : gammas) gh.push_back(g.mean);
  const auto omega = realization(sc.law, 3 * n + 1, {sc.seed, stream_tag::kWindow});
  const auto rep = craig_simon_scan(omega, energies, gh, {n});
  Table t{"craig_simon",
          {"scenario_id", "seed", "law_tag", "n", "energy", "gamma_hat", "gamma_stderr", "excess_1_n",
           "excess_minus_n_minus_1_inv", "excess_n1_2n", "excess_2n2_3n_inv"},
          {}};
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    t.add({sc.id, std::to_string(sc.seed), law_str(sc.law), std::to_string(r.n), format_double(r.energy),
           format_double(r.gamma_hat), format_double(gammas[k].se), format_double(r.excess[0]),
           format_double(r.excess[1]), format_double(r.excess[2]), format_double(r.excess[3])});
  }
  json families = json::object();
  for (std::size_t f = 0; f < 4; ++f) families[std::string(CraigSimonReport::kFamilies[f])] = rep.max_excess[f];
  out.summary = {{"max_excess", families}, {"worst", rep.worst()}};
  if (cfg.expect.contains("max_excess_below")) {
    const double bound = cfg.expect["max_excess_below"].get<double>();
    out.checks.push_back({"max_excess_below", rep.worst() < bound, "worst excess " + format_double(rep.worst())});
  }
  out.tables.push_back(std::move(t));
  return out;
}

inline RunResult run_spectrum(const Config& cfg) {
  RunResult out;
  const auto& sc = cfg.scenario;
  const auto omega = realization(sc.law, sc.box_dimension / 2 + 1, {sc.seed, stream_tag::kWindow});
  const std::int64_t lo = -sc.box_dimension / 2;
  const TridiagonalBox box(omega.slice(lo, lo + sc.box_dimension - 1));
  Table t{"spectrum", {"scenario_id", "seed", "law_tag", "box_lo", "box_hi", "j", "eigenvalue", "residual", "center"}, {}};
  double worst = 0.0;
  const auto inside = eigenvalues_in(box, sc.interval_lo, sc.interval_hi);
  if (!inside.empty()) {
    const auto pairs = eigenpairs(box, inside.front().first, inside.back().first + 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::size_t c = 0;
      for (std::size_t k = 1; k < pairs[i].vector.size(); ++k)
        if (std::abs(pairs[i].vector[k]) > std::abs(pairs[i].vector[c])) c = k;
      worst = std::max(worst, pairs[i].residual);
      t.add({sc.id, std::to_string(sc.seed), law_str(sc.law), std::to_string(box.lo()), std::to_string(box.hi()),
             std::to_string(inside[i].first), format_double(pairs[i].value), format_double(pairs[i].residual),
             std::to_string(box.lo() + static_cast<std::int64_t>(c))});
    }
  }
  out.summary = {{"eigenvalues", t.rows.size()}, {"max_residual", worst}};
  if (cfg.expect.contains("max_residual")) {
    const double bound = cfg.expect["max_residual"].get<double>();
    out.checks.push_back({"max_residual", worst <= bound, "max residual " + format_double(worst)});
  }
  out.tables.push_back(std::move(t));
  return out;
}

inline const std::map<std::string, std::function<RunResult(const Config&)>>& subcommands() {
  static const std::map<std::string, std::function<RunResult(const Config&)>> table = {
      {"lyapunov", run_lyapunov},   {"lde", run_lde},          {"lift-check", run_lift},
      {"conditions", run_conditions}, {"localize", run_localize}, {"census", run_census},
      {"edge-census", run_edge},    {"craig-simon", run_craig_simon}, {"spectrum", run_spectrum}};
  return table;
}

inline const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"lyapunov", "Monte Carlo Lyapunov exponents on the energy list"},
      {"lde", "large-deviation tail curves and fitted rates"},
      {"lift-check", "compare tails under P1 and P0 against the density bound"},
      {"conditions", "verdicts for logmom, logmomunif and logsum"},
      {"localize", "eigenfunction decay fits and regularity scans in a box"},
      {"census", "singular sites among +-2n, +-(2n+1) at the anchor energy"},
      {"edge-census", "violations of |V_m| <= n^(r/alpha) in the edge zones"},
      {"craig-simon", "excess of normalized transfer norms over gamma-hat"},
      {"spectrum", "box eigenvalues in the energy interval with residuals"}};
  return d;
}

}  // namespace cli

/// Runs one invocation. `args` excludes the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for 1-D random Schroedinger operators", "anderson-lab"};
  std::string config_path, out_dir, format = "csv";
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool assert_mode = false;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads (default: $ANDERSON_LAB_WORKERS)")
                          ->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "Scenario config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Write result files into this directory");
  app.add_flag("--assert", assert_mode, "Failed expectations exit with code 3");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.require_subcommand(1, 1);
  for (const auto& [name, desc] : cli::descriptions()) app.add_subcommand(name, desc)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (config_path.empty()) {
    err << "error: --config is required\n" << app.help();
    return kValidation;
  }
  if (workers_opt->count() == 0) {
    workers = 0;
    if (const char* env = std::getenv("ANDERSON_LAB_WORKERS"); env && *env) {
      try {
        std::size_t used = 0;
        const long v = std::stol(env, &used);
        if (used != std::string(env).size() || v < 1) throw std::invalid_argument(env);
        workers = static_cast<unsigned>(v);
      } catch (const std::exception&) {
        err << "error: ANDERSON_LAB_WORKERS must be a positive integer\n";
        return kValidation;
      }
    }
  }

  json doc;
  Config cfg = [&]() -> Config {
    try {
      doc = json::parse(read_text(config_path));
    } catch (const std::exception& e) {
      throw ConfigError(std::vector<Violation>{{"", config_path + ": " + e.what()}});
    }
    if (seed_opt->count() && doc.is_object() && doc.contains("sampling") && doc["sampling"].is_object())
      doc["sampling"]["seed"] = seed;
    return load_config(doc);
  }();
  if (workers > 0) cfg.scenario.workers = workers;
  if (!out_dir.empty()) cfg.output.dir = out_dir;

  RunManifest manifest;
  manifest.seed = cfg.scenario.seed;
  manifest.config_digest = config_digest(doc);
  manifest.workers = cfg.scenario.workers;
  manifest.command = command;
  manifest.started = utc_timestamp();
  err << "anderson-lab " << command << " [" << cfg.scenario.id << "] seed " << cfg.scenario.seed << ", "
      << cfg.scenario.workers << " worker(s): running\n";
  const auto t0 = std::chrono::steady_clock::now();

  RunResult result;
  try {
    result = cli::subcommands().at(command)(cfg);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return kRuntime;
  }
  manifest.finished = utc_timestamp();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json checks = json::array();
  bool all_pass = true;
  for (const auto& c : result.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    all_pass = all_pass && c.passed;
  }
  result.summary["checks"] = checks;

  try {
    if (!cfg.output.dir.empty()) {
      const auto files = persist_tables(result.tables, result.summary, manifest, cfg.output.dir,
                                        cfg.output.stem + "_" + command, format);
      for (const auto& f : files) err << "  wrote " << f.string() << "\n";
    } else if (format == "json") {
      out << report_json(result.tables, result.summary, manifest).dump(2) << "\n";
    } else {
      out << to_csv(result.tables.front());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }

  for (const auto& c : result.checks)
    err << (c.passed ? "  expectation ok: " : (assert_mode ? "  expectation FAILED: " : "  warning: expectation failed: "))
        << c.name << " (" << c.detail << ")\n";
  char elapsed[32];
  std::snprintf(elapsed, sizeof elapsed, "%.2f", secs);
  err << "anderson-lab " << command << " [" << cfg.scenario.id << "]: done in " << elapsed << " s\n";
  if (assert_mode && !all_pass) return kAssertFailed;
  return kOk;
}

/// dispatch() with configuration errors mapped to exit code 1.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations) err << "config error: " << (v.path.empty() ? "/" : v.path) << ": " << v.message << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace anderson_lab
