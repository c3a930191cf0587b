#include <doctest.h>

#include "pqec/config.hpp"

using namespace pqec;

namespace {

const char* kFitConfig = R"(
[study]
kind = "fit"       # study selector
label = "demo"
seed = 42

[code]
distance = 3

[noise]
kind = "dephasing_only"
p_phys = 0.01
mismatch_factor = 1.0

[fit]
gamma_tau = [0.08, 0.1]
mismatch = [1.0]
distance_b = 7

[ansatz]
A = 0.1
p_phys = 1e-4
p_th = 1e-2
C = 1.0
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("parse: sections, scalars, strings, arrays, comments") {
  const Config cfg = Config::parse(kFitConfig, "test.toml");
  const StudyHeader h = read_study_header(cfg);
  CHECK(h.kind == "fit");
  CHECK(h.label == "demo");
  CHECK(h.seed == 42);
  const FitStudySpec spec = read_fit_spec(cfg, h.seed);
  CHECK(spec.gamma_tau_grid == std::vector<double>{0.08, 0.1});
  CHECK(spec.mismatch_grid == std::vector<double>{1.0});
  CHECK(spec.distance_b == 7);
  CHECK(spec.noise.p_phys == 0.01);
  CHECK(spec.strategyB_ansatz.p_phys == 1e-4);
  CHECK_NOTHROW(cfg.reject_unknown_keys());
}

TEST_CASE("parse: line numbers in diagnostics") {
  try {
    Config::parse("[a]\nx 3\n", "f.toml");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("f.toml:2") != std::string::npos);
  }
}

TEST_CASE("parse: duplicates, bad headers, keys outside sections") {
  CHECK_THROWS_AS(Config::parse("[a]\nx = 1\nx = 2\n"), config_error);
  CHECK_THROWS_AS(Config::parse("[a]\n[a]\n"), config_error);
  CHECK_THROWS_AS(Config::parse("[a\nx = 1\n"), config_error);
  CHECK_THROWS_AS(Config::parse("x = 1\n"), config_error);
  CHECK_THROWS_AS(Config::parse("[a]\nx = \"oops\n"), config_error);
  CHECK_THROWS_AS(Config::parse("[a]\nx = [1, 2\n"), config_error);
}

TEST_CASE("typed getters enforce types") {
  const Config cfg = Config::parse("[s]\nnum = 1.5\nint = 3\nflag = true\nname = \"x\"\narr = [1, 2]\n");
  CHECK(cfg.get_double("s", "num", 0) == 1.5);
  CHECK(cfg.get_int("s", "int", 0) == 3);
  CHECK(cfg.get_bool("s", "flag", false));
  CHECK(cfg.get_string("s", "name", "") == "x");
  CHECK(cfg.get_double_array("s", "arr", {}) == std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(cfg.get_int("s", "num", 0), config_error);
  CHECK_THROWS_AS(cfg.get_double("s", "name", 0), config_error);
  CHECK_THROWS_AS(cfg.get_double("s", "arr", 0), config_error);
  CHECK_THROWS_AS(cfg.get_bool("s", "int", false), config_error);
}

TEST_CASE("unknown keys and sections are rejected with locations") {
  const Config cfg = Config::parse(kFitConfig + std::string("misspelled = 1\n"), "t.toml");
  read_fit_spec(cfg, 1);
  read_study_header(cfg);
  try {
    cfg.reject_unknown_keys();
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string what = e.what();
    CHECK(what.find("misspelled") != std::string::npos);
    CHECK(what.find("[ansatz]") != std::string::npos);
  }

  const Config cfg2 = Config::parse("[study]\nkind = \"fit\"\n\n[bogus]\n");
  read_study_header(cfg2);
  CHECK_THROWS_AS(cfg2.reject_unknown_keys(), config_error);
}

TEST_CASE("overrides: applied after parse, before validation") {
  Config cfg = Config::parse(kFitConfig, "t.toml");
  cfg.apply_override("noise.p_phys=0.02");
  cfg.apply_override("study.label=\"patched\"");
  const StudyHeader h = read_study_header(cfg);
  CHECK(h.label == "patched");
  const FitStudySpec spec = read_fit_spec(cfg, h.seed);
  CHECK(spec.noise.p_phys == 0.02);
  CHECK_THROWS_AS(cfg.apply_override("no_dot"), config_error);
  CHECK_THROWS_AS(cfg.apply_override("a.b"), config_error);
}

TEST_CASE("missing required sections and values") {
  const Config cfg = Config::parse("[study]\nkind = \"extract\"\n");
  CHECK_THROWS_AS(read_extract_spec(cfg, 1), config_error);

  const Config cfg2 = Config::parse("[study]\nkind = \"extract\"\n[code]\ndistance = 3\n[noise]\nkind = \"dephasing_only\"\n[extract]\nmethod = \"exact\"\n");
  CHECK_THROWS_AS(read_extract_spec(cfg2, 1), config_error);  // p_phys missing
}

TEST_CASE("config echo to JSON keeps types") {
  const Config cfg = Config::parse("[s]\nnum = 1.5\nflag = true\nname = \"x\"\narr = [1, 2.5]\n");
  const nlohmann::json j = cfg.to_json();
  CHECK(j["s"]["num"] == 1.5);
  CHECK(j["s"]["flag"] == true);
  CHECK(j["s"]["name"] == "x");
  CHECK(j["s"]["arr"][0] == 1);
  CHECK(j["s"]["arr"][1] == 2.5);
}

TEST_CASE("dynamics and resource specs from config") {
  const Config cfg = Config::parse(R"(
[study]
kind = "dynamics"

[exciton]
J = 0.25
gamma1 = 0.04

[dynamics]
tau = 0.1
steps = 12
dephasing_mismatch = 1.06
)");
  read_study_header(cfg);
  const DynamicsSpec spec = read_dynamics_spec(cfg, 9);
  CHECK(spec.params.hop == 0.25);
  CHECK(spec.params.gamma1 == 0.04);
  CHECK(spec.params.gamma2 == 0.05);  // default retained
  CHECK(spec.tau == 0.1);
  CHECK(spec.steps == 12);
  CHECK(spec.dephasing_mismatch == 1.06);
  CHECK_NOTHROW(cfg.reject_unknown_keys());

  const Config rcfg = Config::parse(R"(
[study]
kind = "resources"

[resources]
n_logical = 2
zeta = 0.2
delta_tar = [1e-3]
eps_over_m = [1e-6]
)");
  read_study_header(rcfg);
  const ResourceStudySpec rspec = read_resource_spec(rcfg);
  CHECK(rspec.zeta == 0.2);
  CHECK(rspec.delta_tar_grid == std::vector<double>{1e-3});
  CHECK_NOTHROW(rcfg.reject_unknown_keys());
}

TEST_SUITE_END();
