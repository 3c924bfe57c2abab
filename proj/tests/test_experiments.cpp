#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "anderson_lab/config.hpp"
#include "anderson_lab/experiments.hpp"
#include "oracles.hpp"
#include "../tools/pinned.hpp"

using namespace anderson_lab;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

Config shipped(const std::string& name) {
  return load_config_file(fs::path(ANDERSON_LAB_SOURCE_DIR) / "scenarios" / (name + ".json"));
}

Scenario coin_scenario(std::uint64_t seed) {
  Scenario s(ProductLaw::exact(BaseMeasure::bernoulli()));
  s.id = "coin";
  s.seed = seed;
  s.n_grid = {10, 20, 40, 80, 160, 300};
  s.gamma_samples = 100;
  return s;
}

fs::path scratch(const std::string& leaf) {
  auto p = fs::temp_directory_path() / ("anderson_lab_experiments_" + leaf);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("nu over an interval matches the constant-potential closed form", "[experiments]") {
  Scenario s(ProductLaw::exact(BaseMeasure::point_mass(5.0)));
  s.interval_lo = -1.0;
  s.interval_hi = 1.0;
  s.n_grid = {10};
  s.gamma_samples = 2;
  const auto r = nu_inf(s);
  // |E - 5| is smallest at the right endpoint.
  CHECK_THAT(r.nu, WithinAbs(oracle::constant_lyapunov(5.0, {1.0, 0.0}), 1e-10));
  CHECK_FALSE(r.warning);
  CHECK(r.gamma.estimates.size() == 21);
  CHECK_THAT(r.gamma.at(0.05).mean,
             WithinAbs(0.5 * (oracle::constant_lyapunov(5.0, {0.0, 0.0}) + oracle::constant_lyapunov(5.0, {0.1, 0.0})),
                       1e-10));
  CHECK(default_epsilon0(s, r.nu) == 0.1);
}

TEST_CASE("energy grid spacing never exceeds the request", "[experiments]") {
  const auto g = energy_grid(-0.5, 0.5, 0.1);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == -0.5);
  CHECK(g.back() == 0.5);
  const auto h = energy_grid(0.0, 0.35, 0.1);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] - h[i - 1] <= 0.1 + 1e-15);
}

TEST_CASE("realization values do not depend on reach", "[experiments]") {
  const auto law = ProductLaw::exact(BaseMeasure::bernoulli());
  const auto small = realization(law, 50, {7, stream_tag::kWindow});
  const auto big = realization(law, 400, {7, stream_tag::kWindow});
  for (std::int64_t m = -50; m <= 50; ++m) CHECK(small.at(m) == big.at(m));
}

TEST_CASE("decay fit recovers a planted rate", "[experiments]") {
  std::vector<double> psi(401);
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = std::exp(-0.3 * std::abs(static_cast<double>(i) - 200.0)) * (i % 3 == 0 ? 1.5 : 1.0);
  const auto fit = fit_decay(psi, 200);
  CHECK_THAT(fit.rate, WithinAbs(0.3, 0.01));
  CHECK(fit.points > 10);
}

TEST_CASE("free Laplacian is a negative control", "[experiments]") {
  const auto cfg = shipped("free");
  const auto nu = nu_inf(cfg.scenario);
  CHECK(nu.warning);
  CHECK(std::abs(nu.nu) < 1e-3);
  const auto loc = run_localization(cfg.scenario, nu);
  REQUIRE_FALSE(loc.states.empty());
  CHECK(loc.pass_fraction() == 0.0);
  const auto census = singularity_census(cfg.scenario, nu);
  CHECK(census.last_singular_n() > 150);
}

TEST_CASE("Bernoulli eigenfunctions localize and the paired bump law stays close", "[experiments]") {
  const auto cfg = shipped("bumps");
  const auto exact = cfg.scenario.exact_counterpart();
  const auto nu = nu_inf(exact);
  CHECK_FALSE(nu.warning);
  const auto p1 = run_localization(exact, nu);
  const auto p0 = run_localization(cfg.scenario, nu);
  CHECK(p1.law == LawTag::Exact);
  CHECK(p0.law == LawTag::Approximate);
  CHECK(p1.states.size() > 30);
  CHECK(p1.pass_fraction() >= 0.9);
  CHECK(std::abs(p1.pass_fraction() - p0.pass_fraction()) <= 0.1);
  for (const auto& st : p1.states) {
    CHECK(st.eigenvalue >= exact.interval_lo);
    CHECK(st.eigenvalue <= exact.interval_hi);
  }

  const auto c1 = singularity_census(exact, nu);
  const auto c0 = singularity_census(cfg.scenario, nu);
  CHECK(c1.last_singular_n() < 150);
  CHECK(c0.last_singular_n() < 150);
  for (const auto& row : c1.rows) {
    const auto a = std::abs(row.site);
    CHECK((a == 2 * row.n || a == 2 * row.n + 1));
  }
}

TEST_CASE("localization is stable across seeds", "[experiments]") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = run_localization(coin_scenario(seed));
    CHECK(r.pass_fraction() >= 0.9);
  }
}

TEST_CASE("edge census on bounded atoms sees no violations", "[experiments]") {
  auto s = coin_scenario(1);
  s.n_grid = {2, 4, 8, 16, 32};
  s.samples = 500;
  const auto rep = edge_bound_census(s, 1.0, 2.0);
  for (const auto& row : rep.rows) {
    CHECK(row.violating_trials == 0);
    CHECK(row.predicted == 0.0);
    CHECK(row.within_3se);
    CHECK(row.below_bound);
  }
  CHECK(rep.violations_stop);
}

TEST_CASE("edge census on a Pareto tail", "[experiments]") {
  const auto cfg = shipped("pareto");
  const auto rep = edge_bound_census(cfg.scenario, cfg.scenario.edge_p, cfg.scenario.edge_r);
  for (const auto& row : rep.rows) {
    CHECK(row.within_3se);
    CHECK(row.below_bound);
    CHECK(row.sites == edge_zone(row.n, cfg.scenario.edge_p).size());
  }
  CHECK(rep.violations_stop);

  SECTION("frequencies fall as r grows") {
    const auto loose = edge_bound_census(cfg.scenario, cfg.scenario.edge_p, 1.5);
    REQUIRE(loose.rows.size() == rep.rows.size());
    for (std::size_t g = 0; g < rep.rows.size(); ++g)
      CHECK(loose.rows[g].violating_trials >= rep.rows[g].violating_trials);
  }

  SECTION("a misdeclared moment exponent is flagged") {
    const auto bad = shipped("pareto_misdeclared");
    const auto wrong = edge_bound_census(bad.scenario, bad.scenario.edge_p, bad.scenario.edge_r);
    CHECK_FALSE(wrong.violations_stop);
    for (const auto& row : wrong.rows) CHECK(row.within_3se);
  }
}

TEST_CASE("edge zones are symmetric windows around plus and minus n", "[experiments]") {
  const auto z = edge_zone(100, 1.0);
  const auto k = static_cast<std::int64_t>(std::floor(std::log(100.0)));
  CHECK(z.size() == static_cast<std::size_t>(2 * (2 * k + 1)));
  CHECK(std::find(z.begin(), z.end(), 100) != z.end());
  CHECK(std::find(z.begin(), z.end(), -100) != z.end());
}

TEST_CASE("empty reports persist as header-only CSV", "[persist]") {
  LocalizationReport empty;
  empty.scenario_id = "empty";
  const auto dir = scratch("empty");
  const auto written = persist(empty, RunManifest{}, dir);
  CHECK(read_text(dir / "empty_localize_localization.csv") ==
        "scenario_id,seed,law_tag,box_lo,box_hi,j,eigenvalue,gamma_hat,gamma_stderr,decay_rate,center,pass\n");
  CHECK(fs::exists(dir / "empty_localize_manifest.json"));
  CHECK(fs::exists(dir / "empty_localize.json"));
  CensusReport none;
  none.scenario_id = "empty";
  persist(none, RunManifest{}, dir);
  CHECK(read_text(dir / "empty_census_census.csv") == "scenario_id,seed,law_tag,n,site,verdict\n");
}

TEST_CASE("persisted tables load back unchanged", "[persist]") {
  auto s = coin_scenario(2);
  const auto nu = nu_inf(s);
  const auto loc = run_localization(s, nu);
  const auto census = singularity_census(s, nu);
  const auto dir = scratch("roundtrip");
  RunManifest m;
  m.seed = s.seed;
  persist(loc, m, dir);
  persist(census, m, dir);

  const auto t = load_table(dir / "coin_localize_localization.csv", "localization");
  CHECK(t == localization_table(loc));
  const auto states = localization_states(t);
  REQUIRE(states.size() == loc.states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    CHECK(states[i].eigenvalue == loc.states[i].eigenvalue);
    CHECK(states[i].decay_rate == loc.states[i].decay_rate);
    CHECK(states[i].pass == loc.states[i].pass);
  }
  const auto rows = census_rows(load_table(dir / "coin_census_census.csv", "census"));
  REQUIRE(rows.size() == census.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == census.rows[i].n);
    CHECK(rows[i].site == census.rows[i].site);
    CHECK(rows[i].verdict == census.rows[i].verdict);
  }
  const auto doc = json::parse(read_text(dir / "coin_localize.json"));
  CHECK(doc["tables"]["localization"]["rows"].size() == loc.states.size());
  CHECK(doc["manifest"]["seed"] == 2);
}

TEST_CASE("CSV output does not depend on worker count", "[persist]") {
  auto one = coin_scenario(3);
  auto many = one;
  many.workers = 8;
  CHECK(to_csv(localization_table(run_localization(one))) == to_csv(localization_table(run_localization(many))));
  CHECK(to_csv(census_table(singularity_census(one))) == to_csv(census_table(singularity_census(many))));
  one.n_grid = many.n_grid = {2, 8, 32, 128};
  one.law = many.law = ProductLaw::exact(BaseMeasure(ParetoTail{1.0, 1.2, true}, 1.0));
  one.samples = many.samples = 2000;
  CHECK(to_csv(edge_table(edge_bound_census(one, 1.0, 2.0))) == to_csv(edge_table(edge_bound_census(many, 1.0, 2.0))));
}

TEST_CASE("manifest digest ignores key order", "[persist]") {
  const auto a = json::parse(R"({"id": "x", "sampling": {"seed": 1, "samples": 10}, "grids": {"n": [1, 2]}})");
  const auto b = json::parse(R"({"grids": {"n": [1, 2]}, "sampling": {"samples": 10, "seed": 1}, "id": "x"})");
  CHECK(config_digest(a) == config_digest(b));
  const auto c = json::parse(R"({"id": "x", "sampling": {"seed": 2, "samples": 10}, "grids": {"n": [1, 2]}})");
  CHECK(config_digest(a) != config_digest(c));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("doubles are written with 17 significant digits", "[persist]") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(parse_double(format_double(M_PI)) == M_PI);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(detail::csv_split("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
}

TEST_CASE("pinned expectations reproduce", "[pinned]") {
  const auto doc = json::parse(read_text(fs::path(ANDERSON_LAB_SOURCE_DIR) / "tests" / "expectations.json"));
  const auto fresh = pinned::compute(fs::path(ANDERSON_LAB_SOURCE_DIR) / "scenarios");
  REQUIRE(fresh.size() == doc["entries"].size());
  for (const auto& [name, want] : doc["entries"].items()) {
    INFO(name);
    REQUIRE(fresh.contains(name));
    const double v = fresh[name]["value"].get<double>(), w = want["value"].get<double>();
    CHECK_THAT(v, WithinAbs(w, 1e-9 * std::max(1.0, std::abs(w))));
  }

  // Independent oracle for the pinned exponent: one long trajectory by plain
  // vector iteration, batch-means error.
  const auto& pin = doc["entries"]["bernoulli_gamma_E0"];
  auto gen = RngStream{11, 0}.generator();
  const auto law = ProductLaw::exact(BaseMeasure::bernoulli());
  double a = 1.0, b = 0.0;
  std::vector<double> batches;
  for (int k = 0; k < 41; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 25000; ++i) {
      const double next = -law.sample_site(i, gen) * a - b;
      b = a;
      a = next;
      const double r = std::hypot(a, b);
      acc += std::log(r);
      a /= r;
      b /= r;
    }
    if (k > 0) batches.push_back(acc / 25000.0);
  }
  const auto ref = stats::mean_stderr(batches);
  CHECK(std::abs(pin["value"].get<double>() - ref.mean) <= pin["ci"].get<double>() + stats::kSigmas * ref.se);
}
