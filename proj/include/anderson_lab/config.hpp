#pragma once

// Scenario configuration documents: parsing and validation. Nothing here draws
// random numbers; a config is fully checked before any experiment starts.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anderson_lab/estimators.hpp"
#include "anderson_lab/experiments.hpp"
#include "anderson_lab/measures.hpp"
#include "anderson_lab/persist.hpp"

namespace anderson_lab {

struct Violation {
  std::string path;
  std::string message;

  [[nodiscard]] std::string text() const { return path + ": " + message; }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Violation> v)
      : std::runtime_error(v.empty() ? "invalid config" : v.front().text()), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

struct ExperimentSettings {
  std::vector<double> energies{0.0};
  double energy_imag = 0.0;
  double epsilon = 0.2;
  bool epsilon_relative = true;
  Statistic statistic{};
  std::int64_t n = 1000;
  std::int64_t conditions_n_max = 100000;
  std::int64_t conditions_k_max = 1000;
  std::size_t burn_in = 128;
};

struct OutputSettings {
  std::string dir;
  std::string format = "csv";
  std::string stem;
};

struct Config {
  json document;
  Scenario scenario;
  DensitySequence densities;
  ExperimentSettings experiment;
  OutputSettings output;
  json expect = json::object();
};

namespace detail {

/// Accumulates violations while walking a document; every accessor reports
/// its JSON path.
class ConfigReader {
 public:
  std::vector<Violation> violations;

  void fail(std::string path, std::string message) { violations.push_back({std::move(path), std::move(message)}); }

  bool object_at(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void allow_only(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) fail(path + "/" + k, "unknown key");
    }
  }

  const json* find(const json& obj, const std::string& path, std::string_view key, bool required) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) fail(path + "/" + std::string(key), "required key missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& path, std::string_view key, bool required = false) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      fail(path + "/" + std::string(key), "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& path, std::string_view key, bool required = false) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(path + "/" + std::string(key), "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::uint64_t> unsigned_integer(const json& obj, const std::string& path, std::string_view key,
                                                bool required = false) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
      fail(path + "/" + std::string(key), "expected a non-negative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& path, std::string_view key) {
    const json* v = find(obj, path, key, false);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      fail(path + "/" + std::string(key), "expected a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path, std::string_view key, bool required = false) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(path + "/" + std::string(key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(path + "/" + std::to_string(i), "expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::int64_t>> integers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        fail(path + "/" + std::to_string(i), "expected an integer");
        return std::nullopt;
      }
      out.push_back(v[i].get<std::int64_t>());
    }
    return out;
  }

  void require(bool ok, const std::string& path, std::string message) {
    if (!ok) fail(path, std::move(message));
  }
};

inline std::optional<BaseMeasure> read_measure(ConfigReader& r, const json& m) {
  const std::string path = "/measure";
  if (!r.object_at(m, path)) return std::nullopt;
  const auto type = r.string(m, path, "type", true);
  const auto alpha = r.number(m, path, "alpha_moment", true);
  const bool trivial_ok = r.boolean(m, path, "allow_trivial").value_or(false);
  if (alpha) r.require(*alpha > 0.0, path + "/alpha_moment", "alpha_moment must be positive");
  if (!type) return std::nullopt;

  BaseMeasure::Shape shape;
  const std::size_t before = r.violations.size();
  if (*type == "atoms") {
    r.allow_only(m, path, {"type", "alpha_moment", "allow_trivial", "locations", "weights"});
    std::optional<std::vector<double>> loc, w;
    if (const json* j = r.find(m, path, "locations", true)) loc = r.numbers(*j, path + "/locations");
    if (const json* j = r.find(m, path, "weights", true)) w = r.numbers(*j, path + "/weights");
    if (loc && w) {
      r.require(loc->size() == w->size(), path + "/weights", "one weight per location required");
      shape = FiniteAtoms{*loc, *w};
    }
  } else if (*type == "bernoulli") {
    r.allow_only(m, path, {"type", "alpha_moment", "allow_trivial", "a", "b", "p"});
    const double a = r.number(m, path, "a").value_or(-1.0);
    const double b = r.number(m, path, "b").value_or(1.0);
    const double p = r.number(m, path, "p").value_or(0.5);
    r.require(p >= 0.0 && p <= 1.0, path + "/p", "p must lie in [0, 1]");
    shape = FiniteAtoms{{a, b}, {p, 1.0 - p}};
  } else if (*type == "point_mass") {
    r.allow_only(m, path, {"type", "alpha_moment", "allow_trivial", "location"});
    const auto c = r.number(m, path, "location", true);
    if (c) shape = FiniteAtoms{{*c}, {1.0}};
  } else if (*type == "uniform") {
    r.allow_only(m, path, {"type", "alpha_moment", "allow_trivial", "lo", "hi"});
    const auto lo = r.number(m, path, "lo", true), hi = r.number(m, path, "hi", true);
    if (lo && hi) shape = UniformInterval{*lo, *hi};
  } else if (*type == "pareto") {
    r.allow_only(m, path, {"type", "alpha_moment", "allow_trivial", "scale", "exponent", "symmetric"});
    const auto scale = r.number(m, path, "scale", true), exponent = r.number(m, path, "exponent", true);
    const bool symmetric = r.boolean(m, path, "symmetric").value_or(true);
    if (scale && exponent) shape = ParetoTail{*scale, *exponent, symmetric};
  } else {
    r.fail(path + "/type", "unknown measure type '" + *type + "' (atoms, bernoulli, point_mass, uniform, pareto)");
  }
  if (r.violations.size() != before || !alpha || !(*alpha > 0.0)) return std::nullopt;
  try {
    return BaseMeasure(shape, *alpha, trivial_ok);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    std::string where = path;
    if (what.find("weight") != std::string::npos) where += "/weights";
    if (what.find("moment") != std::string::npos) where += *type == "pareto" ? "/exponent" : "/alpha_moment";
    if (what.find("interval") != std::string::npos) where += "/hi";
    r.fail(where, what);
    return std::nullopt;
  }
}

inline std::optional<SiteSet> read_sites(ConfigReader& r, const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j == "all") return SiteSet::all();
    if (j == "powers_of_two") return SiteSet::powers_of_two();
    r.fail(path, "unknown site set '" + j.get<std::string>() + "' (all, powers_of_two, {range}, {list})");
    return std::nullopt;
  }
  if (!r.object_at(j, path)) return std::nullopt;
  r.allow_only(j, path, {"range", "list"});
  if (const json* range = r.find(j, path, "range", false)) {
    const auto v = r.integers(*range, path + "/range");
    if (!v) return std::nullopt;
    if (v->size() != 2 || (*v)[0] > (*v)[1]) {
      r.fail(path + "/range", "expected [lo, hi] with lo <= hi");
      return std::nullopt;
    }
    return SiteSet::range((*v)[0], (*v)[1]);
  }
  if (const json* list = r.find(j, path, "list", false)) {
    const auto v = r.integers(*list, path + "/list");
    if (!v) return std::nullopt;
    return SiteSet::explicit_sites(*v);
  }
  r.fail(path, "expected \"range\" or \"list\"");
  return std::nullopt;
}

inline std::optional<DensitySequence> read_densities(ConfigReader& r, const json* d, const BaseMeasure& base) {
  const std::string path = "/densities";
  if (!d) return DensitySequence(base);
  if (!r.object_at(*d, path)) return std::nullopt;
  const auto type = r.string(*d, path, "type", true);
  if (!type) return std::nullopt;
  const std::size_t before = r.violations.size();
  DensitySequence::Rule rule = IdentityDensity{};
  if (*type == "identity") {
    r.allow_only(*d, path, {"type"});
  } else if (*type == "atom_reweight") {
    r.allow_only(*d, path, {"type", "rules"});
    AtomReweight rw;
    if (const json* rules = r.find(*d, path, "rules", true)) {
      if (!rules->is_array() || rules->empty()) {
        r.fail(path + "/rules", "expected a non-empty array");
      } else {
        for (std::size_t i = 0; i < rules->size(); ++i) {
          const std::string rp = path + "/rules/" + std::to_string(i);
          const json& rule_j = (*rules)[i];
          if (!r.object_at(rule_j, rp)) continue;
          r.allow_only(rule_j, rp, {"sites", "beta"});
          std::optional<SiteSet> sites;
          std::optional<std::vector<double>> beta;
          if (const json* s = r.find(rule_j, rp, "sites", true)) sites = read_sites(r, *s, rp + "/sites");
          if (const json* b = r.find(rule_j, rp, "beta", true)) beta = r.numbers(*b, rp + "/beta");
          if (sites && beta) rw.rules.push_back({*sites, *beta});
        }
      }
    }
    rule = rw;
  } else if (*type == "bump") {
    r.allow_only(*d, path, {"type", "sites", "height", "mass"});
    std::optional<SiteSet> sites;
    if (const json* s = r.find(*d, path, "sites", true)) sites = read_sites(r, *s, path + "/sites");
    const auto height = r.number(*d, path, "height", true);
    const auto mass = r.number(*d, path, "mass").value_or(0.5);
    if (sites && height) rule = BumpSchedule{*sites, *height, mass};
  } else {
    r.fail(path + "/type", "unknown density type '" + *type + "' (identity, atom_reweight, bump)");
  }
  if (r.violations.size() != before) return std::nullopt;
  try {
    return DensitySequence(rule, base);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    std::string where = path;
    if (what.find("beta") != std::string::npos) where += "/rules";
    if (what.find("height") != std::string::npos) where += "/height";
    if (what.find("mass") != std::string::npos) where += "/mass";
    r.fail(where, what);
    return std::nullopt;
  }
}

inline std::optional<std::vector<std::int64_t>> read_n_grid(ConfigReader& r, const json& j, const std::string& path) {
  if (j.is_array()) return r.integers(j, path);
  if (!r.object_at(j, path)) return std::nullopt;
  r.allow_only(j, path, {"start", "stop", "step"});
  const auto start = r.integer(j, path, "start", true), stop = r.integer(j, path, "stop", true);
  const auto step = r.integer(j, path, "step", true);
  if (!start || !stop || !step) return std::nullopt;
  if (*step < 1 || *start > *stop) {
    r.fail(path, "expected start <= stop and step >= 1");
    return std::nullopt;
  }
  std::vector<std::int64_t> out;
  for (auto n = *start; n <= *stop; n += *step) out.push_back(n);
  return out;
}

inline std::optional<std::vector<double>> read_energy_grid(ConfigReader& r, const json& j, const std::string& path) {
  if (j.is_array()) return r.numbers(j, path);
  if (!r.object_at(j, path)) return std::nullopt;
  r.allow_only(j, path, {"lo", "hi", "count"});
  const auto lo = r.number(j, path, "lo", true), hi = r.number(j, path, "hi", true);
  const auto count = r.integer(j, path, "count", true);
  if (!lo || !hi || !count) return std::nullopt;
  if (*count < 2 || !(*lo < *hi)) {
    r.fail(path, "expected lo < hi and count >= 2");
    return std::nullopt;
  }
  std::vector<double> out(static_cast<std::size_t>(*count));
  for (std::int64_t i = 0; i < *count; ++i)
    out[static_cast<std::size_t>(i)] = *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(*count - 1);
  out.back() = *hi;
  return out;
}

inline void read_expect(ConfigReader& r, const json& e, const std::string& path) {
  if (!r.object_at(e, path)) return;
  static const std::set<std::string> flags = {"gamma_positive", "eta_positive",  "no_violations", "rate_check_pass",
                                              "within_3se",     "below_bound",   "violations_stop", "nu_positive"};
  static const std::set<std::string> reals = {"closed_form_tol", "pass_fraction_min", "paired_gap_max",
                                              "paired_ratio_max", "max_excess_below", "max_residual"};
  for (const auto& [k, v] : e.items()) {
    const std::string p = path + "/" + k;
    if (flags.count(k)) {
      r.require(v.is_boolean(), p, "expected a boolean");
    } else if (reals.count(k)) {
      r.require(v.is_number() && v.get<double>() >= 0.0, p, "expected a non-negative number");
    } else if (k == "last_singular_n_below") {
      r.require(v.is_number_integer() && v.get<std::int64_t>() >= 1, p, "expected a positive integer");
    } else if (k == "lyapunov_mean") {
      if (!r.object_at(v, p)) continue;
      r.allow_only(v, p, {"value", "tol"});
      r.number(v, p, "value", true);
      const auto tol = r.number(v, p, "tol", true);
      if (tol) r.require(*tol > 0.0, p + "/tol", "tol must be positive");
    } else if (k == "verdicts") {
      if (!r.object_at(v, p)) continue;
      r.allow_only(v, p, {"logmom", "logmomunif", "logsum"});
      for (const auto& [c, verdict] : v.items())
        r.require(verdict == "holds" || verdict == "violated" || verdict == "inconclusive", p + "/" + c,
                  "expected holds, violated or inconclusive");
    } else {
      r.fail(p, "unknown expectation");
    }
  }
}

}  // namespace detail

/// Every problem with `doc`, each naming its JSON path. Empty iff usable.
inline std::vector<Violation> validate(const json& doc);

/// Parses and validates; throws ConfigError listing every violation.
inline Config load_config(const json& doc) {
  detail::ConfigReader r;
  if (!r.object_at(doc, "")) throw ConfigError(r.violations);
  r.allow_only(doc, "", {"$schema", "id", "description", "measure", "densities", "law", "experiment", "grids", "sampling", "output"});

  const auto id = r.string(doc, "", "id", true);
  if (id) r.require(!id->empty() && id->find_first_of("/\\ ") == std::string::npos, "/id", "id must be a non-empty name without spaces or slashes");

  std::optional<BaseMeasure> base;
  if (const json* m = r.find(doc, "", "measure", true)) base = detail::read_measure(r, *m);
  std::optional<DensitySequence> densities;
  if (base) densities = detail::read_densities(r, r.find(doc, "", "densities", false), *base);

  LawTag tag = densities && !densities->is_identity() ? LawTag::Approximate : LawTag::Exact;
  if (const auto law = r.string(doc, "", "law")) {
    if (*law == "P1") tag = LawTag::Exact;
    else if (*law == "P0") tag = LawTag::Approximate;
    else r.fail("/law", "expected \"P1\" or \"P0\"");
  }

  // grids
  std::optional<std::vector<std::int64_t>> n_grid;
  std::optional<std::vector<double>> grid_energies;
  if (const json* g = r.find(doc, "", "grids", true); g && r.object_at(*g, "/grids")) {
    r.allow_only(*g, "/grids", {"n", "energies"});
    if (const json* n = r.find(*g, "/grids", "n", true)) n_grid = detail::read_n_grid(r, *n, "/grids/n");
    if (n_grid) {
      r.require(!n_grid->empty(), "/grids/n", "n grid must be non-empty");
      for (std::size_t i = 0; i < n_grid->size(); ++i) {
        r.require((*n_grid)[i] >= 1, "/grids/n/" + std::to_string(i), "n must be >= 1");
        if (i > 0) r.require((*n_grid)[i] > (*n_grid)[i - 1], "/grids/n/" + std::to_string(i), "n grid must be strictly increasing");
      }
    }
    if (const json* e = r.find(*g, "/grids", "energies", false)) {
      grid_energies = detail::read_energy_grid(r, *e, "/grids/energies");
      if (grid_energies) r.require(!grid_energies->empty(), "/grids/energies", "energy grid must be non-empty");
    }
  }

  // sampling
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000, gamma_samples = 100;
  std::int64_t gamma_length = 1000;
  unsigned workers = 1;
  std::size_t burn_in = 128;
  if (const json* s = r.find(doc, "", "sampling", true); s && r.object_at(*s, "/sampling")) {
    r.allow_only(*s, "/sampling", {"seed", "samples", "gamma_samples", "gamma_length", "workers", "burn_in"});
    seed = r.unsigned_integer(*s, "/sampling", "seed", true);
    auto positive = [&](std::string_view key, auto& target) {
      if (const auto v = r.integer(*s, "/sampling", key)) {
        if (*v < 1) r.fail("/sampling/" + std::string(key), "must be >= 1");
        else target = static_cast<std::remove_reference_t<decltype(target)>>(*v);
      }
    };
    positive("samples", samples);
    positive("gamma_samples", gamma_samples);
    positive("gamma_length", gamma_length);
    positive("workers", workers);
    if (const auto v = r.integer(*s, "/sampling", "burn_in")) {
      if (*v < 0) r.fail("/sampling/burn_in", "must be >= 0");
      else burn_in = static_cast<std::size_t>(*v);
    }
  }

  // experiment
  ExperimentSettings ex;
  ex.burn_in = burn_in;
  double s_lo = -0.5, s_hi = 0.5, spacing = 0.1;
  std::int64_t box = 400;
  std::optional<double> eps0, alpha_override;
  double edge_p = 1.0, edge_r = 2.0;
  json expect = json::object();
  std::optional<std::vector<double>> ex_energies;
  std::optional<double> ex_energy;
  if (const json* e = r.find(doc, "", "experiment", false); e && r.object_at(*e, "/experiment")) {
    const std::string p = "/experiment";
    r.allow_only(*e, p, {"energy", "energies", "energy_imag", "interval", "energy_spacing", "epsilon", "epsilon_relative",
                         "statistic", "n", "box_dimension", "epsilon0", "edge", "conditions", "expect"});
    ex_energy = r.number(*e, p, "energy");
    if (const json* j = r.find(*e, p, "energies", false)) ex_energies = r.numbers(*j, p + "/energies");
    ex.energy_imag = r.number(*e, p, "energy_imag").value_or(0.0);
    if (const json* j = r.find(*e, p, "interval", false)) {
      const auto v = r.numbers(*j, p + "/interval");
      if (v && (v->size() != 2 || !((*v)[0] < (*v)[1]))) r.fail(p + "/interval", "expected [s, t] with s < t");
      else if (v) s_lo = (*v)[0], s_hi = (*v)[1];
    }
    if (const auto v = r.number(*e, p, "energy_spacing")) {
      if (!(*v > 0.0 && *v <= 0.1)) r.fail(p + "/energy_spacing", "spacing must lie in (0, 0.1]");
      else spacing = *v;
    }
    if (const auto v = r.number(*e, p, "epsilon")) {
      if (!(*v > 0.0)) r.fail(p + "/epsilon", "epsilon must be positive");
      else ex.epsilon = *v;
    }
    ex.epsilon_relative = r.boolean(*e, p, "epsilon_relative").value_or(true);
    if (const json* st = r.find(*e, p, "statistic", false)) {
      if (st->is_string()) {
        if (*st == "log_norm") ex.statistic = Statistic::log_norm();
        else if (*st == "log_det") ex.statistic = Statistic::log_det();
        else r.fail(p + "/statistic", "expected log_norm, log_det or {\"u\", \"v\"}");
      } else if (r.object_at(*st, p + "/statistic")) {
        r.allow_only(*st, p + "/statistic", {"u", "v"});
        std::optional<std::vector<double>> u, v;
        if (const json* j = r.find(*st, p + "/statistic", "u", true)) u = r.numbers(*j, p + "/statistic/u");
        if (const json* j = r.find(*st, p + "/statistic", "v", true)) v = r.numbers(*j, p + "/statistic/v");
        auto unit = [&](const std::optional<std::vector<double>>& x, const char* key) {
          if (!x) return false;
          const bool ok = x->size() == 2 && std::abs(std::hypot((*x)[0], (*x)[1]) - 1.0) <= 1e-12;
          r.require(ok, p + "/statistic/" + key, "expected a unit vector of length 2");
          return ok;
        };
        const bool uok = unit(u, "u"), vok = unit(v, "v");
        if (uok && vok) ex.statistic = Statistic::element({(*u)[0], (*u)[1]}, {(*v)[0], (*v)[1]});
      }
    }
    if (const auto v = r.integer(*e, p, "n")) {
      if (*v < 2) r.fail(p + "/n", "n must be >= 2");
      else ex.n = *v;
    }
    if (const auto v = r.integer(*e, p, "box_dimension")) {
      if (*v < 200) r.fail(p + "/box_dimension", "box dimension must be >= 200");
      else box = *v;
    }
    if (const auto v = r.number(*e, p, "epsilon0")) {
      if (!(*v > 0.0)) r.fail(p + "/epsilon0", "epsilon0 must be positive");
      else eps0 = *v;
    }
    if (const json* edge = r.find(*e, p, "edge", false); edge && r.object_at(*edge, p + "/edge")) {
      r.allow_only(*edge, p + "/edge", {"p", "r", "alpha_override"});
      if (const auto v = r.number(*edge, p + "/edge", "p")) {
        if (!(*v > 0.0)) r.fail(p + "/edge/p", "p must be positive");
        else edge_p = *v;
      }
      if (const auto v = r.number(*edge, p + "/edge", "r")) {
        if (!(*v > 1.0)) r.fail(p + "/edge/r", "r must exceed 1");
        else edge_r = *v;
      }
      if (const auto v = r.number(*edge, p + "/edge", "alpha_override")) {
        if (!(*v > 0.0)) r.fail(p + "/edge/alpha_override", "alpha must be positive");
        else alpha_override = *v;
      }
    }
    if (const json* c = r.find(*e, p, "conditions", false); c && r.object_at(*c, p + "/conditions")) {
      r.allow_only(*c, p + "/conditions", {"n_max", "k_max"});
      if (const auto v = r.integer(*c, p + "/conditions", "n_max")) {
        if (*v < 10) r.fail(p + "/conditions/n_max", "n_max must be >= 10");
        else ex.conditions_n_max = *v;
      }
      if (const auto v = r.integer(*c, p + "/conditions", "k_max")) {
        if (*v < 0) r.fail(p + "/conditions/k_max", "k_max must be >= 0");
        else ex.conditions_k_max = *v;
      }
    }
    if (const json* x = r.find(*e, p, "expect", false)) {
      detail::read_expect(r, *x, p + "/expect");
      expect = *x;
    }
  }
  if (ex_energies) ex.energies = *ex_energies;
  else if (grid_energies) ex.energies = *grid_energies;
  else if (ex_energy) ex.energies = {*ex_energy};
  for (double e : ex.energies)
    if (!std::isfinite(e)) r.fail("/experiment/energies", "energies must be finite");
  if (ex.energies.empty()) r.fail("/experiment/energies", "energy list must be non-empty");

  OutputSettings out;
  if (const json* o = r.find(doc, "", "output", false); o && r.object_at(*o, "/output")) {
    r.allow_only(*o, "/output", {"dir", "format", "stem"});
    out.dir = r.string(*o, "/output", "dir").value_or("");
    out.format = r.string(*o, "/output", "format").value_or("csv");
    out.stem = r.string(*o, "/output", "stem").value_or("");
    r.require(out.format == "csv" || out.format == "json", "/output/format", "expected csv or json");
  }

  if (!r.violations.empty() || !base || !densities || !n_grid || !seed || !id) throw ConfigError(r.violations);

  ProductLaw law = tag == LawTag::Exact ? ProductLaw::exact(*base) : ProductLaw::approximate(*densities);
  Scenario sc(std::move(law));
  sc.id = *id;
  sc.interval_lo = s_lo;
  sc.interval_hi = s_hi;
  sc.energy_spacing = spacing;
  sc.n_grid = *n_grid;
  sc.samples = samples;
  sc.gamma_samples = gamma_samples;
  sc.gamma_length = gamma_length;
  sc.seed = *seed;
  sc.workers = workers;
  sc.box_dimension = box;
  sc.epsilon0 = eps0;
  sc.edge_p = edge_p;
  sc.edge_r = edge_r;
  sc.alpha_override = alpha_override;
  if (out.stem.empty()) out.stem = *id;
  return Config{doc, std::move(sc), std::move(*densities), std::move(ex), std::move(out), std::move(expect)};
}

inline std::vector<Violation> validate(const json& doc) {
  try {
    load_config(doc);
  } catch (const ConfigError& e) {
    return e.violations;
  }
  return {};
}

inline Config load_config_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<Violation>{{"", path.string() + ": not valid JSON: " + e.what()}});
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::vector<Violation>{{"", e.what()}});
  }
  return load_config(doc);
}

}  // namespace anderson_lab
