#include "rpnv/runner.hpp"

#include "rpnv/errors.hpp"
#include "rpnv/oracle.hpp"
#include "rpnv/parallel.hpp"
#include "rpnv/strongcoupling.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace rpnv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, const ExperimentConfig& cfg, const std::string& hash) : path_(path) {
    comment("experiment", cfg.name);
    comment("kind", to_string(cfg.kind));
    comment("config_hash", hash);
    comment("seed", std::to_string(cfg.seed));
  }
  void comment(const std::string& key, const std::string& value) { comments_.push_back("# " + key + ": " + value); }
  void header(std::vector<std::string> cols) { header_ = std::move(cols); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  fs::path write() const {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path_.string() + "'");
    for (const auto& c : comments_) out << c << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return path_;
  }

 private:
  fs::path path_;
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& options;
  std::string hash;
  unsigned threads;
  RunReport report;
  json oracle_entries = json::array();

  CsvFile csv(const std::string& file) const { return CsvFile(options.out_dir / file, cfg, hash); }
  void add(const CsvFile& f) { report.files.push_back(f.write()); }
};

// Variants expand into (label, radical pair) pairs; no variants means the base pair only.
std::vector<std::pair<std::string, RadicalPairSpec>> expand_variants(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, RadicalPairSpec>> out;
  if (cfg.variants.empty()) {
    out.emplace_back("", cfg.radical_pair);
  } else {
    for (const auto& v : cfg.variants) out.emplace_back(v.label, v.apply(cfg.radical_pair));
  }
  return out;
}

SensorParams signal_sensor(const ExperimentConfig& cfg) {
  const SensorParams s = cfg.sensor.build();
  if (cfg.signal.mode == "single_molecule") {
    return SensorParams::single_molecule(cfg.geometry.r_nm, s.density_per_nm3, s.t2);
  }
  return s;
}

QuadratureSpec quadrature_for(const ExperimentConfig& cfg, const Rotation& rotation) {
  QuadratureSpec q;
  q.alpha_nodes = cfg.signal.alpha_nodes;
  q.beta_nodes = cfg.signal.beta_nodes;
  if (cfg.signal.mode != "volume") {
    q.orientation = rotation.is_identity() ? OrientationModel::aligned() : OrientationModel::fixed_rotation(rotation);
  } else if (cfg.signal.orientation == "radial") {
    q.orientation = OrientationModel::radial();
  } else if (cfg.signal.orientation == "fixed" || !rotation.is_identity()) {
    q.orientation = OrientationModel::fixed_rotation(rotation);
  }
  return q;
}

// RK4 vs eigen-propagator over a 1 µs window of the same Hamiltonian. Returns max deviation of
// ⟨S₁ᵢ + S₂ᵢ⟩ and the singlet probability, or nullopt when the system is too large.
std::optional<double> oracle_check(Context& ctx, const std::string& label, const RadicalPairConfig& rp,
                                   const FieldConfig& field, const Rotation& rotation) {
  const SpinOperators ops(rp.layout());
  if (ops.dimension() > 64) {
    ctx.report.warnings.push_back("oracle skipped for '" + label + "': dimension " +
                                  std::to_string(ops.dimension()) + " exceeds 64");
    return std::nullopt;
  }
  const OperatorMatrix h = build_rp_hamiltonian(ops, rp, field, rotation);
  const Propagator prop(h, effective_decay_rate(rp.recombination_rate, ctx.cfg.decay()));
  const double window = 1e-6;
  const double range = std::max(prop.spectral_range(), 1.0);
  const auto samples = std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(1.25 * window * range / constants::kPi)));
  const TimeGrid grid = TimeGrid::uniform(window, samples);
  const std::vector<OperatorMatrix> obs{ops.total(0), ops.total(1), ops.total(2), ops.singlet_projector()};
  const DensityMatrix rho0 = initial_state(rp.initial_state, ops.layout());
  const auto exact = expectation_series(rho0, prop, grid, obs);
  const auto sub = static_cast<std::size_t>(std::ceil(grid.dt * range / 0.01));
  OracleOptions oo;
  oo.record_every = sub;
  const auto rk = rk4_evolve(rho0, h, prop.decay_rate(), grid.dt / static_cast<double>(sub),
                             grid.dt * static_cast<double>(samples - 1), obs, oo);
  double dev = 0.0;
  for (std::size_t o = 0; o < obs.size(); ++o) {
    for (std::size_t j = 0; j < samples && j < rk.observables[o].size(); ++j) {
      dev = std::max(dev, std::abs(exact[o][j] - rk.observables[o][j]));
    }
  }
  ctx.oracle_entries.push_back({{"label", label}, {"field_mT", field.magnitude_mT},
                                {"theta_rad", field.theta}, {"window_s", window},
                                {"rk4_dt_s", rk.dt}, {"max_deviation", dev}});
  if (dev > ctx.options.oracle_tolerance) {
    throw NumericalError("oracle deviation " + num(dev) + " exceeds tolerance for '" + label + "'");
  }
  ctx.report.oracle_deviation = std::max(ctx.report.oracle_deviation.value_or(0.0), dev);
  return dev;
}

void run_time_trace(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const RadicalPairConfig rp = cfg.radical_pair.build();
  const FieldConfig field = cfg.field.build();
  const Rotation rot = cfg.radical_pair.orientation();
  const SensorParams sensor = signal_sensor(cfg);
  const SpinOperators ops(rp.layout());
  const EvolutionOptions evo = cfg.evolution();

  const Propagator prop(build_rp_hamiltonian(ops, rp, field, rot), evo.decay_rate(rp));
  const TimeGrid grid = evo.grid_for(prop);
  const DensityMatrix rho0 = initial_state(rp.initial_state, ops.layout());
  for (double t : {0.0, grid.at(grid.samples / 2), grid.at(grid.samples - 1)}) {
    const double m = min_eigenvalue(prop.evolve(rho0, t));
    if (m < -1e-9) throw NumericalError("density matrix lost positivity: min eigenvalue " + num(m));
  }
  SignalTrace trace;
  if (cfg.signal.mode == "volume") {
    EvolutionOptions fixed = evo;
    fixed.grid = grid;
    trace = signal_volume(rp, field, sensor, quadrature_for(cfg, rot), fixed);
  } else {
    const auto geom = coupling_geometry(cfg.geometry.r_nm, field.theta, field.phi, rot);
    trace = signal_max(evolve_observables(rho0, prop, grid, ops, geom), sensor);
  }
  const std::vector<OperatorMatrix> ps{ops.singlet_projector()};
  const auto singlet = expectation_series(rho0, prop, grid, ps)[0];
  const Eigen::Vector3d xi = time_integrated(trace);

  auto f = ctx.csv("trace.csv");
  f.comment("units", "t in s; X in T; singlet_probability dimensionless");
  f.comment("signal_mode", cfg.signal.mode);
  f.comment("X_I", num(xi[0]) + " " + num(xi[1]) + " " + num(xi[2]));
  f.comment("singlet_yield", num(singlet_yield(singlet, prop.decay_rate(), grid.dt)));
  f.header({"t_s", "X_x_T", "X_y_T", "X_z_T", "singlet_probability"});
  for (std::size_t j = 0; j < grid.samples; ++j) {
    f.row({num(grid.at(j)), num(trace.x[0][j]), num(trace.x[1][j]), num(trace.x[2][j]), num(singlet[j])});
  }
  ctx.add(f);

  const auto spec = spectrum(trace);
  auto s = ctx.csv("spectrum.csv");
  s.comment("units", "freq in Hz; |X(f)| in T*s (one-sided DFT magnitude times dt)");
  s.header({"freq_hz", "X_x_Ts", "X_y_Ts", "X_z_Ts"});
  for (std::size_t k = 0; k < spec.freq_hz.size(); ++k) {
    s.row({num(spec.freq_hz[k]), num(spec.magnitude[0][k]), num(spec.magnitude[1][k]), num(spec.magnitude[2][k])});
  }
  ctx.add(s);

  if (ctx.options.oracle) oracle_check(ctx, cfg.name, rp, field, rot);
}

void run_sweep(Context& ctx, bool magnitude) {
  const auto& cfg = ctx.cfg;
  const SensorParams sensor = signal_sensor(cfg);
  const Rotation rot = cfg.radical_pair.orientation();
  SweepOptions so;
  so.evolution = cfg.evolution();
  so.quadrature = quadrature_for(cfg, rot);
  so.threads = ctx.threads;
  so.allow_tilted_magnitude_sweep = cfg.sweep.allow_tilted;
  so.densify = cfg.sweep.densify;
  for (const auto& [label, spec] : expand_variants(cfg)) {
    const RadicalPairConfig rp = spec.build();
    const FieldConfig field = cfg.field.build();
    SweepResult res =
        magnitude ? sweep_field_magnitude(rp, field.theta, field.phi, cfg.sweep.field_grid_mT(), sensor, so)
                  : sweep_field_angle(rp, field.magnitude_mT, cfg.sweep.theta_grid_rad(), field.phi, sensor,
                                      cfg.sweep.normalize, so);
    auto f = ctx.csv(label.empty() ? "sweep.csv" : "sweep_" + label + ".csv");
    if (!label.empty()) f.comment("variant", label);
    f.comment("units", magnitude ? "sweep_value in mT; X_I in T" : "sweep_value in deg; X_I in T");
    f.comment("signal_mode", cfg.signal.mode);
    f.comment("recombination_rate_per_s", num(spec.recombination_rate_per_s));
    f.comment("j_exchange_mT", num(spec.j_exchange_mT));
    f.header({"sweep_value", "X_x_I", "X_y_I", "X_z_I", "X_x_I_norm", "X_z_I_norm", "singlet_yield"});
    for (const auto& p : res.points) {
      f.row({num(magnitude ? p.value : rad_to_deg(p.value)), num(p.x_int[0]), num(p.x_int[1]), num(p.x_int[2]),
             num(p.normalized[0]), num(p.normalized[2]), num(p.singlet_yield)});
    }
    ctx.add(f);
    if (ctx.options.oracle) {
      FieldConfig probe = cfg.field.build();
      if (!res.points.empty()) {
        const auto& mid = res.points[res.points.size() / 2];
        if (magnitude) probe.magnitude_mT = mid.value; else probe.theta = mid.value;
      }
      oracle_check(ctx, label.empty() ? cfg.name : label, rp, probe, rot);
    }
  }
}

void run_ensemble(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const RadicalPairConfig rp = cfg.radical_pair.build();
  const FieldConfig field = cfg.field.build();
  auto f = ctx.csv("ensemble.csv");
  f.comment("units", "sweep_value in mT; mean in T; var in T^2 (across realizations)");
  f.comment("n_realizations", std::to_string(cfg.ensemble.n_realizations));
  f.header({"sweep_value", "mean_X_x_I", "var_X_x_I", "mean_X_z_I", "var_X_z_I", "mode", "seed"});
  for (const auto& mode_name : cfg.ensemble.modes) {
    const OrientationMode mode = mode_name == "random_euler" ? OrientationMode::RandomEuler : OrientationMode::Aligned;
    const EnsembleSpec spec = cfg.ensemble.build(mode, cfg.seed, cfg.sensor.density_per_nm3);
    const auto stats = ensemble_sweep(rp, cfg.sweep.field_grid_mT(), field.theta, field.phi, spec,
                                      cfg.evolution(), ctx.threads);
    for (const auto& p : stats.points) {
      f.row({num(p.value), num(p.mean[0]), num(p.variance[0]), num(p.mean[2]), num(p.variance[2]),
             to_string(mode), std::to_string(cfg.seed)});
    }
  }
  ctx.add(f);
}

void run_peak_count(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const RadicalPairConfig rp = cfg.radical_pair.build();
  const FieldConfig base_field = cfg.field.build();
  const SensorParams sensor = cfg.sensor.build();
  const Rotation rot = cfg.radical_pair.orientation();
  const SpinOperators ops(rp.layout());
  const auto geom = coupling_geometry(cfg.geometry.r_nm, base_field.theta, base_field.phi, rot);
  const auto cls = classify_regime(geom.g_eff, sensor);
  if (cls.on_boundary) ctx.report.warnings.push_back("g_eff equals Gamma: classified as weak coupling");
  LevelOptions lo;
  lo.allow_weak_regime = cfg.strong_coupling.allow_weak;
  const double gamma = sensor.gamma_hz();
  const auto grid = cfg.sweep.field_grid_mT();
  const std::size_t bound = std::size_t{1} << (rp.layout().nuclei_count() + 2);

  std::vector<LevelStructure> levels(grid.size());
  parallel_for(grid.size(), ctx.threads, [&](std::size_t i) {
    const FieldConfig field{grid[i], base_field.theta, base_field.phi};
    levels[i] = level_structure(ops, rp, field, geom, sensor, lo);
  });

  auto peaks = ctx.csv("peaks.csv");
  peaks.comment("units", "B in mT; offsets in Hz relative to the bare NV transition");
  peaks.comment("resolution_hz", num(gamma));
  peaks.header({"B_mT", "peak_center_offset_hz", "multiplicity"});
  auto counts = ctx.csv("peak_count.csv");
  counts.comment("units", "B in mT");
  counts.comment("g_eff_over_2pi_hz", num(geom.g_eff / constants::kTwoPi));
  counts.comment("regime", to_string(cls.regime));
  counts.header({"B_mT", "peak_count", "transition_count", "level_bound"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PeakSet set;
    if (cfg.strong_coupling.amplitude_floor > 0.0) {
      const FieldConfig field{grid[i], base_field.theta, base_field.phi};
      const TimeGrid tg = TimeGrid::uniform(5.0 / std::max(rp.recombination_rate, 1.0), cfg.strong_coupling.contrast_samples);
      const auto c = peak_contrast(rp, field, geom, tg, sensor, lo, cfg.decay());
      std::vector<double> amp;
      for (const auto& series : c.contrast) {
        double m = 0.0;
        for (double v : series) m = std::max(m, std::abs(v));
        amp.push_back(m);
      }
      set = count_resolved_peaks(levels[i].transition_hz, gamma, &amp, cfg.strong_coupling.amplitude_floor);
    } else {
      set = count_resolved_peaks(levels[i], gamma);
    }
    for (std::size_t p = 0; p < set.count(); ++p) {
      peaks.row({num(grid[i]), num(set.centers_hz[p]), std::to_string(set.multiplicity[p])});
    }
    counts.row({num(grid[i]), std::to_string(set.count()), std::to_string(levels[i].transition_count()),
                std::to_string(bound)});
  }
  ctx.add(peaks);
  ctx.add(counts);

  if (cfg.strong_coupling.contrast) {
    const TimeGrid tg = TimeGrid::uniform(5.0 / std::max(rp.recombination_rate, 1.0), cfg.strong_coupling.contrast_samples);
    const auto c = peak_contrast(rp, base_field, geom, tg, sensor, lo, cfg.decay());
    auto f = ctx.csv("contrast.csv");
    f.comment("units", "t in s; C_n dimensionless");
    f.comment("B_mT", num(base_field.magnitude_mT));
    std::vector<std::string> head{"t_s"};
    for (std::size_t n = 0; n < c.contrast.size(); ++n) head.push_back("C_" + std::to_string(n));
    head.push_back("population_sum");
    f.header(head);
    for (std::size_t j = 0; j < tg.samples; ++j) {
      std::vector<std::string> row{num(tg.at(j))};
      for (const auto& series : c.contrast) row.push_back(num(series[j]));
      row.push_back(num(c.population_sum0[j]));
      f.row(row);
    }
    ctx.add(f);
  }
}

void run_coupling_map(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& m = cfg.coupling_map;
  const SensorParams sensor = cfg.sensor.build();
  if (m.r_points < 2 || m.theta_points < 2) throw ConfigError("coupling_map: need >= 2 points per axis");
  auto f = ctx.csv("coupling_map.csv");
  f.comment("units", "r in nm; theta in deg; g_eff/2pi = 2 abs(D_r) norm(d_c)/2pi in Hz; Gamma = 1/(pi T2)");
  f.comment("gamma_hz", num(sensor.gamma_hz()));
  f.header({"r_nm", "theta_deg", "g_eff_over_2pi_hz", "regime", "on_boundary"});
  for (std::size_t i = 0; i < m.r_points; ++i) {
    const double r = m.r_min_nm + (m.r_max_nm - m.r_min_nm) * static_cast<double>(i) / static_cast<double>(m.r_points - 1);
    for (std::size_t k = 0; k < m.theta_points; ++k) {
      const double th = constants::kPi * static_cast<double>(k) / static_cast<double>(m.theta_points - 1);
      const auto g = coupling_geometry(r, th, deg_to_rad(cfg.field.phi_deg));
      const auto cls = classify_regime(g.g_eff, sensor);
      f.row({num(r), num(rad_to_deg(th)), num(g.g_eff / constants::kTwoPi), to_string(cls.regime),
             cls.on_boundary ? "1" : "0"});
    }
  }
  ctx.add(f);
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  config.evolution();  // validates the time-grid section up front
  fs::create_directories(options.out_dir);
  Context ctx{config, options, config_hash(config), resolve_threads(options.threads.value_or(config.threads)), {}, json::array()};

  switch (config.kind) {
    case ExperimentKind::TimeTrace: run_time_trace(ctx); break;
    case ExperimentKind::FieldSweep: run_sweep(ctx, true); break;
    case ExperimentKind::AngleSweep: run_sweep(ctx, false); break;
    case ExperimentKind::Ensemble: run_ensemble(ctx); break;
    case ExperimentKind::PeakCount: run_peak_count(ctx); break;
    case ExperimentKind::CouplingMap: run_coupling_map(ctx); break;
  }

  {
    const fs::path p = options.out_dir / "config.json";
    std::ofstream(p, std::ios::binary) << canonical_text(config) << '\n';
    ctx.report.files.push_back(p);
  }
  ctx.report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["experiment"] = config.name;
  manifest["kind"] = to_string(config.kind);
  manifest["config_hash"] = ctx.hash;
  manifest["seed"] = config.seed;
  manifest["threads"] = ctx.threads;
  manifest["wall_time_s"] = ctx.report.wall_time_s;
  manifest["versions"] = {{"rpnv", RPNV_VERSION},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"fftw", std::string(fftw_version)},
                          {"compiler", std::string(__VERSION__)}};
  json files = json::array();
  for (const auto& f : ctx.report.files) files.push_back(f.filename().string());
  manifest["files"] = files;
  manifest["warnings"] = ctx.report.warnings;
  if (options.oracle) manifest["oracle"] = ctx.oracle_entries;
  const fs::path mp = options.out_dir / "manifest.json";
  std::ofstream(mp, std::ios::binary) << manifest.dump(2) << '\n';
  ctx.report.files.push_back(mp);
  return ctx.report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const PhysicsError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace rpnv
