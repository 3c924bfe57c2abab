#pragma once

// Desk-scale studies: eigenfunction localization, singularity census, the
// edge bound census and nu_I, with their tables and persistence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anderson_lab/estimators.hpp"
#include "anderson_lab/measures.hpp"
#include "anderson_lab/persist.hpp"
#include "anderson_lab/spectral.hpp"

namespace anderson_lab {

struct Scenario {
  std::string id = "scenario";
  ProductLaw law;
  double interval_lo = -0.5;
  double interval_hi = 0.5;
  double energy_spacing = 0.1;
  std::vector<std::int64_t> n_grid;
  std::size_t samples = 10000;
  std::size_t gamma_samples = 100;
  std::int64_t gamma_length = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::int64_t box_dimension = 400;
  std::optional<double> epsilon0;
  double edge_p = 1.0;
  double edge_r = 2.0;
  std::optional<double> alpha_override;

  explicit Scenario(ProductLaw l) : law(std::move(l)) {}

  [[nodiscard]] Scenario with_law(ProductLaw l) const {
    Scenario s = *this;
    s.law = std::move(l);
    return s;
  }

  [[nodiscard]] Scenario exact_counterpart() const { return with_law(law.exact_counterpart()); }

  void validate() const {
    if (!(interval_lo < interval_hi)) throw ValidationError("scenario: energy interval needs s < t");
    if (!(energy_spacing > 0.0 && energy_spacing <= 0.1)) throw ValidationError("scenario: energy spacing must lie in (0, 0.1]");
    if (n_grid.empty()) throw ValidationError("scenario: n grid must be non-empty");
    for (auto n : n_grid)
      if (n < 1) throw ValidationError("scenario: n grid entries must be >= 1");
    if (samples < 1 || gamma_samples < 1 || gamma_length < 1) throw ValidationError("scenario: sample counts must be >= 1");
    if (workers < 1) throw ValidationError("scenario: workers must be >= 1");
  }

  [[nodiscard]] std::int64_t n_max() const { return *std::max_element(n_grid.begin(), n_grid.end()); }
};

/// Evenly spaced grid on [lo, hi], endpoints included, spacing <= `spacing`.
inline std::vector<double> energy_grid(double lo, double hi, double spacing) {
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / spacing - 1e-9)));
  std::vector<double> out(k + 1);
  for (std::size_t i = 0; i <= k; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------
// gamma-hat over the interval and nu_I
// ---------------------------------------------------------------------------

struct GammaTable {
  std::vector<LyapunovEstimate> estimates;

  /// Linear interpolation of (mean, se), clamped to the grid ends.
  [[nodiscard]] stats::MeanStderr at(double e) const {
    const auto& g = estimates;
    if (e <= g.front().energy.real()) return {g.front().mean, g.front().se};
    if (e >= g.back().energy.real()) return {g.back().mean, g.back().se};
    std::size_t k = 1;
    while (g[k].energy.real() < e) ++k;
    const double x0 = g[k - 1].energy.real(), x1 = g[k].energy.real();
    const double w = (e - x0) / (x1 - x0);
    return {(1.0 - w) * g[k - 1].mean + w * g[k].mean, (1.0 - w) * g[k - 1].se + w * g[k].se};
  }
};

struct NuReport {
  GammaTable gamma;
  double nu = 0.0;
  /// Below this, gamma-hat is not resolved from zero at the sampled length.
  double resolution = 0.0;
  bool warning = false;
};

/// gamma-hat is always taken under P1, the law whose exponent gamma(E) is.
inline NuReport nu_inf(const Scenario& s) {
  s.validate();
  const auto energies = energy_grid(s.interval_lo, s.interval_hi, s.energy_spacing);
  NuReport r;
  r.gamma.estimates = lyapunov_grid(s.law.exact_counterpart(), energies, s.gamma_length, s.gamma_samples,
                                    {s.seed, stream_tag::kLyapunov}, {s.workers});
  r.resolution = 10.0 / static_cast<double>(s.gamma_length);
  r.nu = std::numeric_limits<double>::infinity();
  for (const auto& g : r.gamma.estimates) {
    r.nu = std::min(r.nu, g.mean - g.se);
    if (g.mean < stats::kSigmas * g.se || g.mean < r.resolution) r.warning = true;
  }
  return r;
}

inline double default_epsilon0(const Scenario& s, double nu) {
  return s.epsilon0.value_or(std::min(0.1, std::max(nu, 0.0) / 10.0));
}

// ---------------------------------------------------------------------------
// Localization
// ---------------------------------------------------------------------------

/// One realization of omega on [-reach, reach]. Sites >= 0 and sites < 0 come
/// from separate streams drawn outward, so values do not depend on reach.
inline PotentialWindow realization(const ProductLaw& law, std::int64_t reach, RngStream stream) {
  std::vector<double> v(static_cast<std::size_t>(2 * reach + 1));
  auto right = stream.child(0).generator();
  for (std::int64_t m = 0; m <= reach; ++m) v[static_cast<std::size_t>(m + reach)] = law.sample_site(m, right);
  auto left = stream.child(1).generator();
  for (std::int64_t m = -1; m >= -reach; --m) v[static_cast<std::size_t>(m + reach)] = law.sample_site(m, left);
  return PotentialWindow(-reach, std::move(v), stream);
}

struct DecayFit {
  double rate = 0.0;
  double rate_se = 0.0;
  std::size_t points = 0;
};

/// Least squares of log|psi| against distance from `center`, both sides
/// pooled. Per side the decay range ends 5 sites before the box edge or where
/// |psi| first drops under 1e-13 max|psi|; the middle 60% of it is used, and
/// never sites closer than 10 to the center.
inline DecayFit fit_decay(const std::vector<double>& psi, std::size_t center) {
  constexpr double kFloor = 1e-13;
  const double peak = std::abs(psi[center]);
  std::vector<double> d, y;
  for (int side : {-1, 1}) {
    const auto edge = static_cast<std::int64_t>(side < 0 ? center : psi.size() - 1 - center);
    std::int64_t range = edge - 5;
    for (std::int64_t k = 1; k <= edge; ++k) {
      const auto i = static_cast<std::size_t>(static_cast<std::int64_t>(center) + side * k);
      if (std::abs(psi[i]) < kFloor * peak) {
        range = std::min(range, k - 1);
        break;
      }
    }
    const double from = std::max(10.0, 0.2 * static_cast<double>(range));
    const double to = 0.8 * static_cast<double>(range);
    for (std::int64_t k = static_cast<std::int64_t>(std::ceil(from)); static_cast<double>(k) <= to; ++k) {
      const auto i = static_cast<std::size_t>(static_cast<std::int64_t>(center) + side * k);
      d.push_back(static_cast<double>(k));
      y.push_back(std::log(std::abs(psi[i]) / peak));
    }
  }
  if (d.size() < 5) return {0.0, 0.0, d.size()};
  const auto line = stats::least_squares(d, y);
  return {-line.slope, line.slope_se, d.size()};
}

struct LocalizedState {
  std::size_t j = 0;  // index in the box spectrum
  double eigenvalue = 0.0;
  double gamma_hat = 0.0;
  double gamma_se = 0.0;
  double decay_rate = 0.0;
  std::size_t fit_points = 0;
  std::int64_t center = 0;
  bool pass = false;
  std::int64_t largest_singular_n = 0;  // 0: none on the grid
};

struct ResonantSkip {
  std::size_t j = 0;
  std::int64_t n = 0;
  std::int64_t site = 0;
};

struct LocalizationReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  LawTag law = LawTag::Exact;
  std::int64_t box_lo = 0;
  std::int64_t box_hi = 0;
  NuReport nu;
  double epsilon0 = 0.0;
  std::vector<LocalizedState> states;
  std::vector<ResonantSkip> skips;

  [[nodiscard]] double pass_fraction() const {
    if (states.empty()) return 0.0;
    return static_cast<double>(std::count_if(states.begin(), states.end(), [](const auto& s) { return s.pass; })) /
           static_cast<double>(states.size());
  }
};

namespace detail {

inline std::int64_t reach_for(const Scenario& s) { return std::max(s.box_dimension / 2 + 1, 3 * s.n_max() + 1); }

inline TridiagonalBox localization_box(const Scenario& s, const PotentialWindow& omega) {
  const std::int64_t lo = -s.box_dimension / 2;
  return TridiagonalBox(omega.slice(lo, lo + s.box_dimension - 1));
}

}  // namespace detail

inline LocalizationReport run_localization(const Scenario& s, const NuReport& nu) {
  s.validate();
  if (s.box_dimension < 200) throw ValidationError("localize: box dimension must be >= 200");
  const auto omega = realization(s.law, detail::reach_for(s), {s.seed, stream_tag::kWindow});
  const auto box = detail::localization_box(s, omega);

  LocalizationReport r;
  r.scenario_id = s.id;
  r.seed = s.seed;
  r.law = s.law.tag();
  r.box_lo = box.lo();
  r.box_hi = box.hi();
  r.nu = nu;
  r.epsilon0 = default_epsilon0(s, nu.nu);

  const auto inside = eigenvalues_in(box, s.interval_lo, s.interval_hi);
  if (inside.empty()) return r;
  const auto pairs = eigenpairs(box, inside.front().first, inside.back().first + 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& ep = pairs[i];
    LocalizedState st;
    st.j = inside[i].first;
    st.eigenvalue = ep.value;
    const auto g = nu.gamma.at(ep.value);
    st.gamma_hat = g.mean;
    st.gamma_se = g.se;
    std::size_t c = 0;
    for (std::size_t k = 1; k < ep.vector.size(); ++k)
      if (std::abs(ep.vector[k]) > std::abs(ep.vector[c])) c = k;
    st.center = box.lo() + static_cast<std::int64_t>(c);
    const auto fit = fit_decay(ep.vector, c);
    st.decay_rate = fit.rate;
    st.fit_points = fit.points;
    // A fit that cannot tell its slope from zero is not decay.
    st.pass = st.decay_rate >= 0.5 * st.gamma_hat && st.decay_rate > stats::kSigmas * fit.rate_se;

    const double rate = st.gamma_hat - 8.0 * r.epsilon0;
    for (auto n : s.n_grid) {
      for (std::int64_t x : {2 * n, 2 * n + 1}) {
        try {
          if (classify_regularity(omega, x, n, rate, ep.value).verdict == Regularity::singular)
            st.largest_singular_n = std::max(st.largest_singular_n, n);
        } catch (const ResonantEnergy&) {
          r.skips.push_back({st.j, n, x});
        }
      }
    }
    r.states.push_back(st);
  }
  return r;
}

inline LocalizationReport run_localization(const Scenario& s) { return run_localization(s, nu_inf(s)); }

// ---------------------------------------------------------------------------
// Singularity census
// ---------------------------------------------------------------------------

struct CensusRow {
  std::int64_t n = 0;
  std::int64_t site = 0;
  std::string verdict;  // regular | singular | resonant
};

struct CensusReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  LawTag law = LawTag::Exact;
  double anchor_energy = 0.0;
  std::int64_t anchor_center = 0;
  double gamma_hat = 0.0;
  double epsilon0 = 0.0;
  double rate = 0.0;
  std::vector<CensusRow> rows;

  [[nodiscard]] std::size_t singular_count(std::int64_t n) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.n == n && r.verdict == "singular"; }));
  }

  /// Largest n with a singular site; 0 when there is none.
  [[nodiscard]] std::int64_t last_singular_n() const {
    std::int64_t last = 0;
    for (const auto& r : rows)
      if (r.verdict == "singular") last = std::max(last, r.n);
    return last;
  }
};

/// Anchor: the in-interval box eigenvalue whose eigenvector is largest at 0.
/// Sites +-2n and +-(2n + 1) are classified at that energy with rate
/// gamma-hat - 8 eps0.
inline CensusReport singularity_census(const Scenario& s, const NuReport& nu) {
  s.validate();
  if (s.box_dimension < 200) throw ValidationError("census: box dimension must be >= 200");
  const auto omega = realization(s.law, detail::reach_for(s), {s.seed, stream_tag::kWindow});
  const auto box = detail::localization_box(s, omega);

  CensusReport r;
  r.scenario_id = s.id;
  r.seed = s.seed;
  r.law = s.law.tag();
  r.epsilon0 = default_epsilon0(s, nu.nu);

  const auto inside = eigenvalues_in(box, s.interval_lo, s.interval_hi);
  if (inside.empty()) throw std::runtime_error("census: no box eigenvalue in the energy interval");
  const auto pairs = eigenpairs(box, inside.front().first, inside.back().first + 1);
  const auto origin = static_cast<std::size_t>(-box.lo());
  std::size_t best = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if (std::abs(pairs[i].vector[origin]) > std::abs(pairs[best].vector[origin])) best = i;
  r.anchor_energy = pairs[best].value;
  std::size_t c = 0;
  for (std::size_t k = 1; k < pairs[best].vector.size(); ++k)
    if (std::abs(pairs[best].vector[k]) > std::abs(pairs[best].vector[c])) c = k;
  r.anchor_center = box.lo() + static_cast<std::int64_t>(c);
  r.gamma_hat = nu.gamma.at(r.anchor_energy).mean;
  r.rate = r.gamma_hat - 8.0 * r.epsilon0;

  for (auto n : s.n_grid) {
    for (std::int64_t x : {-(2 * n + 1), -2 * n, 2 * n, 2 * n + 1}) {
      std::string verdict;
      try {
        verdict = std::string(regularity_name(classify_regularity(omega, x, n, r.rate, r.anchor_energy).verdict));
      } catch (const ResonantEnergy&) {
        verdict = "resonant";
      }
      r.rows.push_back({n, x, verdict});
    }
  }
  return r;
}

inline CensusReport singularity_census(const Scenario& s) { return singularity_census(s, nu_inf(s)); }

// ---------------------------------------------------------------------------
// Edge bound census
// ---------------------------------------------------------------------------

struct EdgeRow {
  std::int64_t n = 0;
  double threshold = 0.0;
  std::size_t sites = 0;
  std::size_t trials = 0;
  std::size_t violating_trials = 0;
  std::size_t violating_sites = 0;
  double frequency = 0.0;
  double frequency_se = 0.0;
  double predicted = 0.0;
  double chebyshev_bound = 0.0;
  bool within_3se = false;
  bool below_bound = false;
};

struct EdgeReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  LawTag law = LawTag::Exact;
  double alpha = 0.0;
  double p = 0.0;
  double r = 0.0;
  double moment_bound = 0.0;  // C, the uniform alpha-moment bound
  std::vector<EdgeRow> rows;
  /// Fraction of trials with any violation on the upper half of the n grid.
  double late_violation_fraction = 0.0;
  bool violations_stop = false;

  static constexpr double kStopTolerance = 0.05;
};

/// Sites m with |-n - m| <= p log n or |n - m| <= p log n.
inline std::vector<std::int64_t> edge_zone(std::int64_t n, double p) {
  const auto k = static_cast<std::int64_t>(std::floor(p * std::log(static_cast<double>(n))));
  std::set<std::int64_t> sites;
  for (std::int64_t d = -k; d <= k; ++d) {
    sites.insert(-n + d);
    sites.insert(n + d);
  }
  return {sites.begin(), sites.end()};
}

/// Only edge-zone sites are drawn. Trial t at grid point g uses its own
/// stream, independent of r and alpha, so frequencies are monotone in r.
inline EdgeReport edge_bound_census(const Scenario& s, double p, double r) {
  s.validate();
  if (!(r > 1.0)) throw ValidationError("edge-census: r must exceed 1");
  if (!(p > 0.0)) throw ValidationError("edge-census: p must be positive");
  EdgeReport rep;
  rep.scenario_id = s.id;
  rep.seed = s.seed;
  rep.law = s.law.tag();
  rep.alpha = s.alpha_override.value_or(s.law.base().alpha_moment());
  rep.p = p;
  rep.r = r;
  if (!(rep.alpha > 0.0)) throw ValidationError("edge-census: alpha must be positive");

  const auto& seq = s.law.densities();
  const std::size_t grid = s.n_grid.size();
  std::vector<std::vector<std::int64_t>> zones(grid);
  std::vector<double> thresholds(grid);
  double sup_g = 0.0;
  for (std::size_t g = 0; g < grid; ++g) {
    zones[g] = edge_zone(s.n_grid[g], p);
    thresholds[g] = std::pow(static_cast<double>(s.n_grid[g]), r / rep.alpha);
    for (auto m : zones[g]) sup_g = std::max(sup_g, seq.sup_norm(m));
  }
  rep.moment_bound = s.law.base().moment(rep.alpha) * sup_g;

  const std::size_t trials = s.samples;
  std::vector<std::uint32_t> site_hits(trials * grid, 0);
  const RngStream stream{s.seed, stream_tag::kEdge};
  parallel_for(trials, s.workers, [&](std::size_t t) {
    const auto trial = stream.child(t);
    for (std::size_t g = 0; g < grid; ++g) {
      auto gen = trial.child(g).generator();
      std::uint32_t hits = 0;
      for (auto m : zones[g])
        if (std::abs(s.law.sample_site(m, gen)) > thresholds[g]) ++hits;
      site_hits[t * grid + g] = hits;
    }
  });

  std::size_t late = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    bool any = false;
    for (std::size_t g = grid / 2; g < grid; ++g) any = any || site_hits[t * grid + g] > 0;
    late += any ? 1 : 0;
  }
  rep.late_violation_fraction = static_cast<double>(late) / static_cast<double>(trials);
  rep.violations_stop = rep.late_violation_fraction <= EdgeReport::kStopTolerance;

  for (std::size_t g = 0; g < grid; ++g) {
    EdgeRow row;
    row.n = s.n_grid[g];
    row.threshold = thresholds[g];
    row.sites = zones[g].size();
    row.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      row.violating_sites += site_hits[t * grid + g];
      row.violating_trials += site_hits[t * grid + g] > 0 ? 1 : 0;
    }
    const auto prop = stats::proportion(row.violating_trials, trials);
    row.frequency = prop.p;
    row.frequency_se = prop.se;
    double none = 1.0;
    for (auto m : zones[g]) none *= 1.0 - seq.tail(m, row.threshold);
    row.predicted = 1.0 - none;
    const double nn = static_cast<double>(row.n);
    row.chebyshev_bound = 2.0 * rep.moment_bound * (1.0 + 2.0 * p * std::log(nn)) / std::pow(nn, r);
    row.within_3se = std::abs(row.frequency - row.predicted) <= stats::kSigmas * row.frequency_se;
    row.below_bound = row.frequency <= row.chebyshev_bound + stats::kSigmas * row.frequency_se;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tables and persistence
// ---------------------------------------------------------------------------

inline Table localization_table(const LocalizationReport& r) {
  Table t{"localization",
          {"scenario_id", "seed", "law_tag", "box_lo", "box_hi", "j", "eigenvalue", "gamma_hat", "gamma_stderr",
           "decay_rate", "center", "pass"},
          {}};
  for (const auto& s : r.states)
    t.add({r.scenario_id, std::to_string(r.seed), std::string(law_name(r.law)), std::to_string(r.box_lo),
           std::to_string(r.box_hi), std::to_string(s.j), format_double(s.eigenvalue), format_double(s.gamma_hat),
           format_double(s.gamma_se), format_double(s.decay_rate), std::to_string(s.center), format_bool(s.pass)});
  return t;
}

inline Table census_table(const CensusReport& r) {
  Table t{"census", {"scenario_id", "seed", "law_tag", "n", "site", "verdict"}, {}};
  for (const auto& row : r.rows)
    t.add({r.scenario_id, std::to_string(r.seed), std::string(law_name(r.law)), std::to_string(row.n),
           std::to_string(row.site), row.verdict});
  return t;
}

inline Table gamma_table(const std::string& id, std::uint64_t seed, const GammaTable& g) {
  Table t{"gamma", {"scenario_id", "seed", "energy", "n", "samples", "gamma_hat", "gamma_stderr"}, {}};
  for (const auto& e : g.estimates)
    t.add({id, std::to_string(seed), format_double(e.energy.real()), std::to_string(e.n), std::to_string(e.samples),
           format_double(e.mean), format_double(e.se)});
  return t;
}

inline Table edge_table(const EdgeReport& r) {
  Table t{"edge",
          {"scenario_id", "seed", "law_tag", "n", "threshold", "sites", "trials", "violating_trials", "violating_sites",
           "frequency", "frequency_stderr", "predicted", "chebyshev_bound", "within_3se", "below_bound"},
          {}};
  for (const auto& row : r.rows)
    t.add({r.scenario_id, std::to_string(r.seed), std::string(law_name(r.law)), std::to_string(row.n),
           format_double(row.threshold), std::to_string(row.sites), std::to_string(row.trials),
           std::to_string(row.violating_trials), std::to_string(row.violating_sites), format_double(row.frequency),
           format_double(row.frequency_se), format_double(row.predicted), format_double(row.chebyshev_bound),
           format_bool(row.within_3se), format_bool(row.below_bound)});
  return t;
}

inline json localization_summary(const LocalizationReport& r) {
  json skips = json::array();
  for (const auto& k : r.skips) skips.push_back({{"j", k.j}, {"n", k.n}, {"site", k.site}});
  json singular = json::object();
  for (const auto& s : r.states) singular[std::to_string(s.j)] = s.largest_singular_n;
  return {{"law_tag", law_name(r.law)},         {"states", r.states.size()},   {"pass_fraction", r.pass_fraction()},
          {"nu", r.nu.nu},                      {"nu_warning", r.nu.warning},  {"epsilon0", r.epsilon0},
          {"largest_singular_n", singular},     {"resonant_skips", skips}};
}

inline json census_summary(const CensusReport& r) {
  return {{"law_tag", law_name(r.law)},   {"anchor_energy", r.anchor_energy}, {"anchor_center", r.anchor_center},
          {"gamma_hat", r.gamma_hat},     {"epsilon0", r.epsilon0},           {"rate", r.rate},
          {"last_singular_n", r.last_singular_n()}};
}

inline json edge_summary(const EdgeReport& r) {
  return {{"law_tag", law_name(r.law)},
          {"alpha", r.alpha},
          {"p", r.p},
          {"r", r.r},
          {"moment_bound", std::isfinite(r.moment_bound) ? json(r.moment_bound) : json("inf")},
          {"late_violation_fraction", r.late_violation_fraction},
          {"violations_stop", r.violations_stop}};
}

inline std::vector<std::filesystem::path> persist(const LocalizationReport& r, const RunManifest& m,
                                                  const std::filesystem::path& dir) {
  return persist_tables({localization_table(r), gamma_table(r.scenario_id, r.seed, r.nu.gamma)},
                        localization_summary(r), m, dir, r.scenario_id + "_localize");
}

inline std::vector<std::filesystem::path> persist(const CensusReport& r, const RunManifest& m,
                                                  const std::filesystem::path& dir) {
  return persist_tables({census_table(r)}, census_summary(r), m, dir, r.scenario_id + "_census");
}

inline std::vector<std::filesystem::path> persist(const EdgeReport& r, const RunManifest& m,
                                                  const std::filesystem::path& dir) {
  return persist_tables({edge_table(r)}, edge_summary(r), m, dir, r.scenario_id + "_edge");
}

inline Table load_table(const std::filesystem::path& csv, std::string name) { return parse_csv(read_text(csv), std::move(name)); }

inline std::vector<LocalizedState> localization_states(const Table& t) {
  std::vector<LocalizedState> out;
  for (const auto& row : t.rows) {
    LocalizedState s;
    s.j = std::stoull(row[t.column("j")]);
    s.eigenvalue = parse_double(row[t.column("eigenvalue")]);
    s.gamma_hat = parse_double(row[t.column("gamma_hat")]);
    s.gamma_se = parse_double(row[t.column("gamma_stderr")]);
    s.decay_rate = parse_double(row[t.column("decay_rate")]);
    s.center = std::stoll(row[t.column("center")]);
    s.pass = row[t.column("pass")] == "true";
    out.push_back(s);
  }
  return out;
}

inline std::vector<CensusRow> census_rows(const Table& t) {
  std::vector<CensusRow> out;
  for (const auto& row : t.rows)
    out.push_back({std::stoll(row[t.column("n")]), std::stoll(row[t.column("site")]), row[t.column("verdict")]});
  return out;
}

}  // namespace anderson_lab
