#include "rpnv/config.hpp"
#include "rpnv/errors.hpp"
#include "rpnv/presets.hpp"
#include "rpnv/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

void list_presets(std::ostream& os) {
  std::size_t width = 0;
  for (const auto& p : rpnv::presets()) width = std::max(width, p.name.size());
  for (const auto& p : rpnv::presets()) {
    os << p.name << std::string(width + 2 - p.name.size(), ' ') << p.description << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radical-pair / NV-magnetometer simulator"};
  std::string preset;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool oracle = false;
  bool list = false;
  bool dump = false;

  auto* p_opt = app.add_option("--preset", preset, "Run a shipped preset by name");
  app.add_option("--config", config_path, "Run a JSON experiment file")->excludes(p_opt);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Override the RNG seed");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("--oracle", oracle, "Cross-check against the RK4 reference integrator");
  app.add_flag("--list", list, "List presets and exit");
  app.add_flag("--dump-config", dump, "Print the canonical config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list || (preset.empty() && config_path.empty())) {
    list_presets(std::cout);
    return 0;
  }

  try {
    rpnv::ExperimentConfig cfg;
    if (!preset.empty()) {
      auto found = rpnv::find_preset(preset);
      if (!found) {
        std::string msg = "unknown preset '" + preset + "'";
        const auto hint = rpnv::nearest_name(preset, rpnv::preset_names());
        if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
        throw rpnv::ConfigError(msg + " (see --list)");
      }
      cfg = *found;
    } else {
      cfg = rpnv::load_config(config_path);
    }
    if (seed) cfg.seed = *seed;
    cfg.radical_pair.build().validate();
    cfg.sensor.build().validate();
    if (dump) {
      std::cout << rpnv::canonical_text(cfg) << '\n';
      return 0;
    }

    rpnv::RunOptions opts;
    opts.out_dir = out_dir;
    opts.oracle = oracle;
    opts.threads = threads;
    const auto report = rpnv::run_experiment(cfg, opts);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : report.files) std::cout << f.string() << '\n';
    if (report.oracle_deviation) {
      std::printf("oracle max deviation: %.3e\n", *report.oracle_deviation);
    }
    std::printf("done in %.2f s (config %s)\n", report.wall_time_s, rpnv::config_hash(cfg).c_str());
    return 0;
  } catch (const std::exception& e) {
    const int rc = rpnv::exit_code_for(e);
    std::cerr << "error: " << e.what() << '\n';
    return rc;
  }
}
