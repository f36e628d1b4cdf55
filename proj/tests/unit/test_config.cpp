#include "rpnv/config.hpp"
#include "rpnv/errors.hpp"
#include "rpnv/presets.hpp"
#include "rpnv/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rpnv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rpnv_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("every preset validates and round-trips through its canonical form") {
  REQUIRE(presets().size() >= 15);
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    CHECK_FALSE(p.description.empty());
    CHECK(p.config.name == p.name);
    const auto text = canonical_text(p.config);
    const auto back = parse_config_text(text);
    CHECK(back == p.config);
    CHECK(canonical_text(back) == text);
    CHECK(config_hash(back) == config_hash(p.config));
    CHECK_NOTHROW(p.config.radical_pair.build().validate());
    CHECK_NOTHROW(p.config.sensor.build().validate());
    CHECK_NOTHROW(p.config.evolution());
  }
}

TEST_CASE("preset listing covers the shipped experiments") {
  const auto names = preset_names();
  for (const char* n : {"fig3-coupling-map", "fig4a-time-trace", "fig4c-field-sweep", "fig4e-angle-sweep",
                        "fig5-ensemble", "fig6c-peak-count", "fig7-hyperfine-anisotropy", "fig8-exchange-sweep",
                        "fig9-lifetime-sweep", "appendix-iso", "appendix-axial3"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK_FALSE(find_preset("nope").has_value());
  CHECK(nearest_name("appendix-isp", names) == "appendix-iso");
  CHECK(nearest_name("zzzzzzzzzzzzzzzzzz", names).empty());
  CHECK_THROWS_AS(appendix_principal("oblate"), ConfigError);
}

TEST_CASE("appendix presets: equal tensors on both radicals, documented principal values") {
  const auto cfg = *find_preset("appendix-axial3");
  REQUIRE(cfg.radical_pair.radical1.size() == 1);
  REQUIRE(cfg.radical_pair.radical2.size() == 1);
  CHECK(cfg.radical_pair.radical1[0].build().hyperfine_mT == cfg.radical_pair.radical2[0].build().hyperfine_mT);
  CHECK(cfg.radical_pair.j_exchange_mT == 0.25);
  CHECK(cfg.radical_pair.build().recombination_rate == doctest::Approx(2e5));
  const auto iso = appendix_principal("iso");
  CHECK(iso == Eigen::Vector3d(0.5, 0.5, 0.5));
  const auto fig9 = *find_preset("fig9-lifetime-sweep");
  CHECK(fig9.field.magnitude_mT == 0.05);
  double last = 0.0;
  for (const auto& v : fig9.variants) {
    REQUIRE(v.lifetime_us.has_value());
    CHECK(*v.lifetime_us > last);
    last = *v.lifetime_us;
  }
}

TEST_CASE("strict parsing: unknown keys, wrong types and bad choices carry a JSON path") {
  CHECK(error_of(R"({"kind": "time_trace", "feild": {}})").find("$.feild") != std::string::npos);
  CHECK(error_of(R"({"feild": {}})").find("did you mean 'field'") != std::string::npos);
  CHECK(error_of(R"({"field": {"magnitude_mT": "big"}})").find("$.field.magnitude_mT") != std::string::npos);
  CHECK(error_of(R"({"kind": "time_trac"})").find("did you mean 'time_trace'") != std::string::npos);
  CHECK(error_of(R"({"radical_pair": {"radical1": [{"label": "N", "spin": "1"}]}})").find("$.radical_pair.radical1[0]: give exactly one") !=
        std::string::npos);
  CHECK(error_of(R"({"radical_pair": {"radical1": [{"label": "N", "spin": "3/2", "principal_mT": [1,1,1]}]}})")
            .find("$.radical_pair.radical1[0].spin") != std::string::npos);
  CHECK_FALSE(error_of("{not json").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/file.json"), ConfigError);
}

TEST_CASE("shipped example configs load and validate") {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(RPNV_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path());
    CHECK(cfg.description.find("representative values") != std::string::npos);
    CHECK_NOTHROW(cfg.radical_pair.build().validate());
    CHECK(parse_config_text(canonical_text(cfg)) == cfg);
    ++n;
  }
  CHECK(n >= 2);
}

TEST_CASE("physics errors from infeasible parameters") {
  auto cfg = parse_config_text(R"({"radical_pair": {"recombination_rate_per_s": -1}})");
  CHECK_THROWS_AS(cfg.radical_pair.build().validate(), PhysicsError);
  cfg = parse_config_text(R"({"sensor": {"r1_nm": 0}})");
  CHECK_THROWS_AS(cfg.sensor.build().validate(), PhysicsError);
}

TEST_CASE("hash depends on content, including the seed") {
  auto cfg = *find_preset("fig5-ensemble");
  const auto h0 = config_hash(cfg);
  CHECK(h0.size() == 16);
  cfg.seed += 1;
  CHECK(config_hash(cfg) != h0);
}

TEST_CASE("variants override only the fields they name") {
  const auto base = appendix_radical_pair(appendix_principal("axial3"));
  VariantSpec v;
  v.label = "x";
  v.lifetime_us = 2.0;
  const auto out = v.apply(base);
  CHECK(out.recombination_rate_per_s == doctest::Approx(5e5));
  CHECK(out.j_exchange_mT == base.j_exchange_mT);
  CHECK(out.radical1 == base.radical1);
  VariantSpec bad;
  bad.lifetime_us = 0.0;
  CHECK_THROWS_AS(bad.apply(base), PhysicsError);
}

TEST_CASE("runner: deterministic CSV output with header comments and a manifest") {
  auto cfg = *find_preset("appendix-iso");
  cfg.sweep.theta_step_deg = 15.0;
  RunOptions a, b;
  a.out_dir = scratch("a");
  b.out_dir = scratch("b");
  b.threads = 3;
  const auto ra = run_experiment(cfg, a);
  run_experiment(cfg, b);
  const auto csv_a = slurp(a.out_dir / "sweep.csv");
  CHECK(csv_a == slurp(b.out_dir / "sweep.csv"));
  CHECK(csv_a.rfind("# experiment: appendix-iso\n", 0) == 0);
  CHECK(csv_a.find("# config_hash: " + config_hash(cfg)) != std::string::npos);
  CHECK(csv_a.find("sweep_value,X_x_I,X_y_I,X_z_I,X_x_I_norm,X_z_I_norm") != std::string::npos);
  CHECK(slurp(a.out_dir / "config.json") == canonical_text(cfg) + "\n");
  const auto manifest = nlohmann::json::parse(slurp(a.out_dir / "manifest.json"));
  CHECK(manifest["config_hash"] == config_hash(cfg));
  CHECK(manifest.contains("versions"));
  CHECK(manifest.contains("wall_time_s"));
  CHECK(ra.files.size() == 3);
}

TEST_CASE("runner: oracle mode records the RK4 cross-check") {
  auto cfg = *find_preset("appendix-axial3");
  cfg.sweep.theta_step_deg = 45.0;
  RunOptions o;
  o.out_dir = scratch("oracle");
  o.oracle = true;
  const auto r = run_experiment(cfg, o);
  REQUIRE(r.oracle_deviation.has_value());
  CHECK(*r.oracle_deviation < 1e-6);
  o.oracle_tolerance = 1e-30;
  CHECK_THROWS_AS(run_experiment(cfg, o), NumericalError);
}

TEST_CASE("runner outputs for the other kinds") {
  auto map = *find_preset("fig3-coupling-map");
  RunOptions o;
  o.out_dir = scratch("map");
  run_experiment(map, o);
  const auto text = slurp(o.out_dir / "coupling_map.csv");
  CHECK(text.find("r_nm,theta_deg,g_eff_over_2pi_hz,regime,on_boundary") != std::string::npos);

  auto bare = *find_preset("fig6c-peak-count-bare");
  bare.sweep.b_points = 5;
  bare.strong_coupling.contrast_samples = 16;
  o.out_dir = scratch("bare");
  run_experiment(bare, o);
  CHECK(fs::exists(o.out_dir / "peaks.csv"));
  CHECK(fs::exists(o.out_dir / "contrast.csv"));

  auto trace = *find_preset("appendix-axial3");
  trace.kind = ExperimentKind::TimeTrace;
  o.out_dir = scratch("trace");
  run_experiment(trace, o);
  CHECK(fs::exists(o.out_dir / "trace.csv"));
  CHECK(slurp(o.out_dir / "spectrum.csv").find("freq_hz,X_x_Ts,X_y_Ts,X_z_Ts") != std::string::npos);
}

TEST_CASE("exit codes map error categories") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(PhysicsError("x")) == 3);
  CHECK(exit_code_for(NumericalError("x")) == 4);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
}
