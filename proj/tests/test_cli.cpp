#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "anderson_lab/cli.hpp"

using namespace anderson_lab;

namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(ANDERSON_LAB_SOURCE_DIR) / "scenarios";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return (kScenarios / (name + ".json")).string(); }

fs::path write_config(const std::string& name, const json& doc) {
  const auto dir = fs::temp_directory_path() / "anderson_lab_cli";
  fs::create_directories(dir);
  const auto p = dir / (name + ".json");
  write_text(p, doc.dump(2));
  return p;
}

json coin_config() {
  return json::parse(R"({
    "id": "coin",
    "measure": {"type": "bernoulli", "alpha_moment": 1},
    "experiment": {"energies": [0, 0.5]},
    "grids": {"n": [10, 20, 40]},
    "sampling": {"seed": 9, "samples": 400, "gamma_samples": 20}
  })");
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) setenv("ANDERSON_LAB_WORKERS", value, 1);
    else unsetenv("ANDERSON_LAB_WORKERS");
  }
  ~EnvGuard() { unsetenv("ANDERSON_LAB_WORKERS"); }
};

}  // namespace

TEST_CASE("successful run exits 0 and prints CSV", "[cli]") {
  const auto r = run({"lyapunov", "--config", scenario("constant")});
  CHECK(r.code == kOk);
  CHECK(header(r.out) == "scenario_id,seed,law_tag,energy,energy_imag,n,samples,gamma_hat,gamma_stderr,closed_form");
  CHECK(r.err.find("running") != std::string::npos);
}

TEST_CASE("usage errors exit 1 with help on the error stream", "[cli]") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus", "--config", scenario("constant")},
           {"lyapunov", "--config", scenario("constant"), "--nope"},
           {"lyapunov"},
           {"lyapunov", "--config", "/does/not/exist.json"},
           {"lyapunov", "--config", scenario("constant"), "--format", "xml"},
           {"lyapunov", "--config", scenario("constant"), "--workers", "0"}}) {
    const auto r = run(args);
    INFO(r.err);
    CHECK(r.code == kValidation);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
  }
  const auto r = run({"bogus"});
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("every subcommand is registered", "[cli]") {
  for (const auto* name : {"lyapunov", "lde", "lift-check", "conditions", "localize", "census", "edge-census",
                           "craig-simon", "spectrum"})
    CHECK(cli::subcommands().count(name) == 1);
  const auto help = run({"--help"});
  CHECK(help.code == kOk);
  CHECK(help.out.find("edge-census") != std::string::npos);
}

TEST_CASE("invalid configs name the offending path and draw no randomness", "[cli][config]") {
  struct Bad {
    json measure;
    std::string path;
    std::string text;
  };
  const std::vector<Bad> cases = {
      {json::parse(R"({"type": "point_mass", "location": 0, "alpha_moment": 1})"), "/measure",
       "measure: non-trivial support required"},
      {json::parse(R"({"type": "atoms", "locations": [0, 1], "weights": [0.5, 0.4], "alpha_moment": 1})"),
       "/measure/weights", "sum to 1"},
      {json::parse(R"({"type": "pareto", "scale": 1, "exponent": 0.8, "alpha_moment": 1})"), "/measure/exponent",
       "moment condition unsatisfiable"},
  };
  for (const auto& c : cases) {
    auto doc = coin_config();
    doc["measure"] = c.measure;
    const auto violations = validate(doc);
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().path == c.path);
    CHECK(violations.front().message.find(c.text) != std::string::npos);

    g_rng_draws = 0;
    const auto r = run({"localize", "--config", write_config("bad", doc).string()});
    CHECK(r.code == kValidation);
    CHECK(r.err.find(c.path + ": ") != std::string::npos);
    CHECK(g_rng_draws == 0);
  }
}

TEST_CASE("unknown keys and bad types are all reported", "[config]") {
  auto doc = coin_config();
  doc["sampling"]["seeed"] = 3;
  doc["grids"]["n"] = json::array({10, 5});
  doc["experiment"]["box_dimension"] = 50;
  doc["output"] = {{"format", "xml"}};
  const auto v = validate(doc);
  std::set<std::string> paths;
  for (const auto& x : v) paths.insert(x.path);
  CHECK(paths.count("/sampling/seeed") == 1);
  CHECK(paths.count("/grids/n/1") == 1);
  CHECK(paths.count("/experiment/box_dimension") == 1);
  CHECK(paths.count("/output/format") == 1);
  CHECK(validate(coin_config()).empty());
}

TEST_CASE("shipped scenarios are valid", "[config]") {
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    INFO(entry.path().string());
    CHECK(validate(json::parse(read_text(entry.path()))).empty());
  }
}

TEST_CASE("runtime failures exit 2", "[cli]") {
  const auto r = run({"lyapunov", "--config", scenario("constant"), "--out", "/proc/anderson_lab_nowhere"});
  CHECK(r.code == kRuntime);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("failed expectations exit 3 only under --assert", "[cli]") {
  auto doc = coin_config();
  doc["experiment"]["expect"] = {{"lyapunov_mean", {{"value", 5.0}, {"tol", 1e-3}}}};
  const auto path = write_config("expect", doc).string();
  const auto strict = run({"lyapunov", "--config", path, "--assert"});
  CHECK(strict.code == kAssertFailed);
  CHECK(strict.err.find("expectation FAILED") != std::string::npos);
  CHECK(run({"lyapunov", "--config", path}).code == kOk);
  CHECK(run({"conditions", "--config", scenario("bumps"), "--assert"}).code == kOk);
}

TEST_CASE("CSV headers match the documented columns", "[cli]") {
  const auto loc = run({"localize", "--config", scenario("bernoulli")});
  REQUIRE(loc.code == kOk);
  CHECK(header(loc.out) ==
        "scenario_id,seed,law_tag,box_lo,box_hi,j,eigenvalue,gamma_hat,gamma_stderr,decay_rate,center,pass");
  const auto census = run({"census", "--config", scenario("bernoulli")});
  REQUIRE(census.code == kOk);
  CHECK(header(census.out) == "scenario_id,seed,law_tag,n,site,verdict");
}

TEST_CASE("--seed overrides the config seed", "[cli]") {
  const auto path = write_config("coin", coin_config()).string();
  const auto base = run({"lyapunov", "--config", path});
  const auto other = run({"lyapunov", "--config", path, "--seed", "10"});
  CHECK(base.out.find("coin,9,") != std::string::npos);
  CHECK(other.out.find("coin,10,") != std::string::npos);
  CHECK(base.out != other.out);
}

TEST_CASE("--out writes tables and a manifest; --format json writes a report", "[cli]") {
  const auto dir = fs::temp_directory_path() / "anderson_lab_cli_out";
  fs::remove_all(dir);
  const auto path = write_config("coin", coin_config()).string();
  CHECK(run({"lyapunov", "--config", path, "--out", dir.string()}).code == kOk);
  CHECK(fs::exists(dir / "coin_lyapunov_lyapunov.csv"));
  const auto manifest = json::parse(read_text(dir / "coin_lyapunov_manifest.json"));
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["command"] == "lyapunov");
  CHECK(manifest["config_digest"].get<std::string>().size() == 64);
  CHECK(manifest["code_version"] == std::string(kCodeVersion));

  const auto j = run({"lyapunov", "--config", path, "--format", "json"});
  REQUIRE(j.code == kOk);
  const auto doc = json::parse(j.out);
  CHECK(doc["tables"]["lyapunov"]["rows"].size() == 2);
  CHECK(doc["manifest"]["seed"] == 9);
}

TEST_CASE("worker count never changes numeric output", "[cli][determinism]") {
  const auto path = write_config("coin", coin_config()).string();
  for (const auto* cmd : {"lyapunov", "lde", "localize", "census", "spectrum"}) {
    INFO(cmd);
    const auto one = run({cmd, "--config", path, "--workers", "1"});
    const auto eight = run({cmd, "--config", path, "--workers", "8"});
    REQUIRE(one.code == kOk);
    CHECK(one.out == eight.out);
  }
}

TEST_CASE("ANDERSON_LAB_WORKERS supplies the default worker count", "[cli]") {
  const auto path = write_config("coin", coin_config()).string();
  {
    EnvGuard env("4");
    const auto r = run({"lyapunov", "--config", path});
    CHECK(r.code == kOk);
    CHECK(r.err.find("4 worker(s)") != std::string::npos);
    const auto flag = run({"lyapunov", "--config", path, "--workers", "2"});
    CHECK(flag.err.find("2 worker(s)") != std::string::npos);
  }
  {
    EnvGuard env("many");
    CHECK(run({"lyapunov", "--config", path}).code == kValidation);
  }
  {
    EnvGuard env(nullptr);
    CHECK(run({"lyapunov", "--config", path}).err.find("1 worker(s)") != std::string::npos);
  }
}

TEST_CASE("the installed binary wires exit codes through main", "[cli]") {
  const std::string cli = ANDERSON_LAB_CLI;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(cli + " lyapunov --config " + scenario("constant")) == 0);
  CHECK(status(cli + " nonsense") == 1);
  CHECK(status(cli + " lyapunov --config " + scenario("constant") + " --out /proc/anderson_lab_nowhere") == 2);
}
