#include "rpnv/signal.hpp"

#include "rpnv/errors.hpp"
#include "rpnv/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>

namespace rpnv {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Σ_ab W_ab over the quadrature, where X = ξ μ₀γₑħ/(4π) ln(r₂/r₁) Σ_ab W_ab ⟨S̃⟩_ab.
struct Node {
  double alpha;
  double beta;
  double weight;
};

std::vector<Node> quadrature_nodes(const QuadratureSpec& q) {
  if (q.alpha_nodes < 8) throw ConfigError("quadrature needs at least 8 alpha nodes");
  const auto ga = gauss_legendre(q.alpha_nodes, 0.0, constants::kPi / 2.0);
  std::vector<Node> nodes;
  if (q.orientation.beta_dependent()) {
    if (q.beta_nodes < 1) throw ConfigError("quadrature needs at least 1 beta node");
    // Periodic integrand in β: equal-weight midpoint rule is spectrally accurate.
    const double wb = constants::kTwoPi / q.beta_nodes;
    for (std::size_t a = 0; a < ga.nodes.size(); ++a) {
      for (int b = 0; b < q.beta_nodes; ++b) {
        nodes.push_back({ga.nodes[a], (b + 0.5) * wb, ga.weights[a] * std::sin(ga.nodes[a]) * wb});
      }
    }
  } else {
    for (std::size_t a = 0; a < ga.nodes.size(); ++a) {
      nodes.push_back({ga.nodes[a], 0.0, ga.weights[a] * std::sin(ga.nodes[a]) * constants::kTwoPi});
    }
  }
  return nodes;
}

double volume_unit_prefactor(const SensorParams& sensor, const PhysicalConstants& pc = {}) {
  sensor.validate();
  const double xi = per_nm3_to_per_m3(sensor.density_per_nm3);
  return xi * pc.mu0 * pc.gamma_e * pc.hbar / (4.0 * constants::kPi) *
         std::log(sensor.r2_nm / sensor.r1_nm);
}

struct VolumeAverage {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();  // Tesla
  double singlet_yield = 0.0;
};

VolumeAverage volume_average(const SpinOperators& ops, const RadicalPairConfig& cfg,
                             const FieldConfig& field, const SensorParams& sensor,
                             const QuadratureSpec& quad, const EvolutionOptions& evo) {
  const Eigen::Vector3d dc = coupling_factors(field.theta, field.phi);
  VolumeAverage out;
  if (quad.orientation.kind == OrientationModel::Kind::Aligned) {
    const auto p = evaluate_point(ops, cfg, field, Rotation::identity(), evo);
    out.x = signal_prefactor(sensor) * dc.cwiseProduct(p.mean_spin);
    out.singlet_yield = p.singlet_yield;
    return out;
  }
  const double unit = volume_unit_prefactor(sensor);
  if (!quad.orientation.position_dependent()) {
    double wsum = 0.0;
    for (const auto& n : quadrature_nodes(quad)) wsum += n.weight;
    const auto p = evaluate_point(ops, cfg, field, quad.orientation.fixed, evo);
    out.x = unit * wsum * dc.cwiseProduct(p.mean_spin);
    out.singlet_yield = p.singlet_yield;
    return out;
  }
  double wsum = 0.0;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double yield = 0.0;
  for (const auto& n : quadrature_nodes(quad)) {
    const auto p = evaluate_point(ops, cfg, field, quad.orientation.rotation_at(n.alpha, n.beta), evo);
    acc += n.weight * p.mean_spin;
    yield += n.weight * p.singlet_yield;
    wsum += n.weight;
  }
  out.x = unit * dc.cwiseProduct(acc);
  out.singlet_yield = yield / wsum;
  return out;
}

SweepPoint make_point(double value, const Eigen::Vector3d& x, double yield, const Eigen::Vector3d& dc,
                      double eps) {
  SweepPoint p;
  p.value = value;
  p.x_int = x;
  p.singlet_yield = yield;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(dc[i]) > eps) p.normalized[static_cast<std::size_t>(i)] = x[i] / dc[i];
  }
  return p;
}

}  // namespace

TimeGrid EvolutionOptions::grid_for(const Propagator& prop) const {
  if (grid) return *grid;
  return default_time_grid(prop.decay_rate(), prop.spectral_range(), min_samples);
}

Rotation OrientationModel::rotation_at(double alpha, double beta) const {
  switch (kind) {
    case Kind::Aligned:
      return Rotation::identity();
    case Kind::Fixed:
      return fixed;
    case Kind::Radial:
      return Rotation::from_matrix(rotation_z(beta) * rotation_y(alpha));
  }
  return Rotation::identity();
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ConfigError("gauss_legendre: need n >= 1");
  GaussLegendre out;
  out.nodes.resize(static_cast<std::size_t>(n));
  out.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(constants::kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    out.nodes[lo] = mid - half * x;
    out.nodes[hi] = mid + half * x;
    out.weights[lo] = out.weights[hi] = half * w;
  }
  return out;
}

double signal_prefactor(const SensorParams& sensor, const PhysicalConstants& pc) {
  sensor.validate();
  const double xi = per_nm3_to_per_m3(sensor.density_per_nm3);
  return 0.5 * xi * pc.mu0 * pc.gamma_e * pc.hbar * std::log(sensor.r2_nm / sensor.r1_nm);
}

double single_molecule_prefactor(double r_nm, const PhysicalConstants& pc) {
  if (!(r_nm > 0.0)) throw PhysicsError("single_molecule_prefactor: r must be > 0");
  const double r = nm_to_m(r_nm);
  return pc.mu0 * pc.gamma_e * pc.hbar / (4.0 * constants::kPi * r * r * r);
}

SignalTrace signal_max(const ObservableSeries& series, const SensorParams& sensor) {
  const double pre = signal_prefactor(sensor);
  SignalTrace trace;
  trace.grid = series.grid;
  trace.provenance = SignalProvenance::MaxAligned;
  for (std::size_t i = 0; i < 3; ++i) {
    trace.x[i].resize(series.values[i].size());
    std::transform(series.values[i].begin(), series.values[i].end(), trace.x[i].begin(),
                   [pre](double v) { return pre * v; });
  }
  return trace;
}

ObservableSeries simulate_series(const SpinOperators& ops, const RadicalPairConfig& cfg,
                                 const FieldConfig& field, const Rotation& rotation,
                                 const EvolutionOptions& evolution) {
  const Propagator prop(build_rp_hamiltonian(ops, cfg, field, rotation), evolution.decay_rate(cfg));
  const TimeGrid grid = evolution.grid_for(prop);
  const auto geom = coupling_geometry(10.0, field.theta, field.phi, rotation);
  return evolve_observables(initial_state(cfg.initial_state, ops.layout()), prop, grid, ops, geom);
}

PointAverages evaluate_point(const SpinOperators& ops, const RadicalPairConfig& cfg,
                             const FieldConfig& field, const Rotation& rotation,
                             const EvolutionOptions& evolution) {
  const Propagator prop(build_rp_hamiltonian(ops, cfg, field, rotation), evolution.decay_rate(cfg));
  const TimeGrid grid = evolution.grid_for(prop);
  check_sampling(grid, prop);
  const auto avg = time_averages(cfg.initial_state, prop, grid, ops);
  PointAverages out;
  out.mean_spin = avg.total_spin;
  out.singlet_yield =
      prop.decay_rate() * grid.dt * static_cast<double>(grid.samples) * avg.singlet_probability;
  out.spectral_range = prop.spectral_range();
  return out;
}

SignalTrace signal_volume(const RadicalPairConfig& cfg, const FieldConfig& field,
                          const SensorParams& sensor, const QuadratureSpec& quadrature,
                          const EvolutionOptions& evolution) {
  cfg.validate();
  field.validate();
  const SpinOperators ops(cfg.layout());
  const double unit = volume_unit_prefactor(sensor);
  const auto nodes = quadrature_nodes(quadrature);
  SignalTrace trace;
  trace.provenance = SignalProvenance::VolumeIntegrated;
  const double k = evolution.decay_rate(cfg);

  if (!quadrature.orientation.position_dependent()) {
    double wsum = 0.0;
    for (const auto& n : nodes) wsum += n.weight;
    const auto series = simulate_series(ops, cfg, field, quadrature.orientation.rotation_at(0, 0), evolution);
    trace.grid = series.grid;
    for (std::size_t i = 0; i < 3; ++i) {
      trace.x[i].resize(series.values[i].size());
      for (std::size_t j = 0; j < series.values[i].size(); ++j) {
        trace.x[i][j] = unit * wsum * series.values[i][j];
      }
    }
    return trace;
  }

  // Common grid fine enough for every orientation.
  EvolutionOptions evo = evolution;
  if (!evo.grid) {
    double range = 0.0;
    for (const auto& n : nodes) {
      const OperatorMatrix h =
          build_rp_hamiltonian(ops, cfg, field, quadrature.orientation.rotation_at(n.alpha, n.beta));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
      range = std::max(range, es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
    }
    evo.grid = default_time_grid(k, range, evolution.min_samples);
  }
  trace.grid = *evo.grid;
  for (auto& c : trace.x) c.assign(trace.grid.samples, 0.0);
  for (const auto& n : nodes) {
    const auto series =
        simulate_series(ops, cfg, field, quadrature.orientation.rotation_at(n.alpha, n.beta), evo);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < trace.grid.samples; ++j) {
        trace.x[i][j] += unit * n.weight * series.values[i][j];
      }
    }
  }
  return trace;
}

Eigen::Vector3d time_integrated(const SignalTrace& trace) {
  Eigen::Vector3d out;
  for (std::size_t i = 0; i < 3; ++i) {
    if (trace.x[i].empty()) throw ConfigError("time_integrated: empty trace");
    out[static_cast<Eigen::Index>(i)] =
        std::accumulate(trace.x[i].begin(), trace.x[i].end(), 0.0) /
        static_cast<double>(trace.x[i].size());
  }
  return out;
}

SignalSpectrum spectrum(const SignalTrace& trace) {
  const std::size_t n = trace.x[0].size();
  if (n < 2) throw ConfigError("spectrum: need at least 2 samples");
  const std::size_t bins = n / 2 + 1;
  SignalSpectrum out;
  out.freq_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.freq_hz[k] = static_cast<double>(k) / (static_cast<double>(n) * trace.grid.dt);
  }
  double* in = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, spec, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    std::copy(trace.x[i].begin(), trace.x[i].end(), in);
    fftw_execute(plan);
    out.magnitude[i].resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      out.magnitude[i][k] = std::hypot(spec[k][0], spec[k][1]) * trace.grid.dt;
    }
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(spec);
  return out;
}

std::vector<double> SweepResult::values() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.value);
  return v;
}

std::vector<double> SweepResult::component(int i) const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.x_int[i]);
  return v;
}

std::vector<double> SweepResult::singlet_yields() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.singlet_yield);
  return v;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_field_grid() { return log_grid(0.01, 50.0, 60); }

std::vector<double> default_theta_grid() {
  std::vector<double> g(181);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = deg_to_rad(static_cast<double>(i));
  return g;
}

SweepResult sweep_field_magnitude(const RadicalPairConfig& cfg, double theta, double phi,
                                  const std::vector<double>& b_grid_mT, const SensorParams& sensor,
                                  const SweepOptions& options) {
  cfg.validate();
  sensor.validate();
  if (theta != 0.0 && !options.allow_tilted_magnitude_sweep) {
    throw ConfigError("field-magnitude sweep requires theta = 0 (set allow_tilted to override)");
  }
  const SpinOperators ops(cfg.layout());
  const Eigen::Vector3d dc = coupling_factors(theta, phi);

  auto run = [&](const std::vector<double>& grid) {
    std::vector<SweepPoint> pts(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
      const FieldConfig field{grid[i], theta, phi};
      field.validate();
      const auto v = volume_average(ops, cfg, field, sensor, options.quadrature, options.evolution);
      pts[i] = make_point(grid[i], v.x, v.singlet_yield, dc, options.normalize_epsilon);
    });
    return pts;
  };

  SweepResult result;
  result.variable = SweepVariable::FieldMagnitude;
  result.points = run(b_grid_mT);
  if (options.densify && result.points.size() >= 3) {
    std::vector<double> absz;
    for (const auto& p : result.points) absz.push_back(std::abs(p.x_int[2]));
    std::vector<double> extra;
    for (const auto& pk : find_peaks(absz)) {
      for (std::size_t side = 0; side < 2; ++side) {
        const double a = b_grid_mT[pk.index - 1 + side], b = b_grid_mT[pk.index + side];
        for (int s = 1; s < 5; ++s) extra.push_back(a * std::pow(b / a, s / 5.0));
      }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    auto more = run(extra);
    result.points.insert(result.points.end(), more.begin(), more.end());
    std::stable_sort(result.points.begin(), result.points.end(),
                     [](const SweepPoint& l, const SweepPoint& r) { return l.value < r.value; });
  }
  return result;
}

SweepResult sweep_field_angle(const RadicalPairConfig& cfg, double magnitude_mT,
                              const std::vector<double>& theta_grid, double phi,
                              const SensorParams& sensor, bool normalize,
                              const SweepOptions& options) {
  cfg.validate();
  sensor.validate();
  const SpinOperators ops(cfg.layout());
  SweepResult result;
  result.variable = SweepVariable::Theta;
  result.points.resize(theta_grid.size());
  parallel_for(theta_grid.size(), options.threads, [&](std::size_t i) {
    const FieldConfig field{magnitude_mT, theta_grid[i], phi};
    field.validate();
    const auto v = volume_average(ops, cfg, field, sensor, options.quadrature, options.evolution);
    const Eigen::Vector3d dc = coupling_factors(theta_grid[i], phi);
    auto p = make_point(theta_grid[i], v.x, v.singlet_yield, dc, options.normalize_epsilon);
    if (!normalize) p.normalized = {};
    result.points[i] = p;
  });
  return result;
}

std::vector<Peak> find_peaks(const std::vector<double>& y) {
  std::vector<Peak> peaks;
  const std::size_t n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    double left_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      left_min = std::min(left_min, y[j]);
    }
    double right_min = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      right_min = std::min(right_min, y[j]);
    }
    peaks.push_back({i, y[i], y[i] - std::max(left_min, right_min)});
  }
  return peaks;
}

double peak_width(const std::vector<double>& x, const std::vector<double>& y, const Peak& peak) {
  if (x.size() != y.size() || peak.index >= y.size()) throw ConfigError("peak_width: bad input");
  const double level = peak.value - 0.5 * peak.prominence;
  const auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (level - y[a]) / (y[b] - y[a]) * (x[b] - x[a]);
  };
  double left = std::numeric_limits<double>::quiet_NaN(), right = left;
  for (std::size_t j = peak.index; j-- > 0;) {
    if (y[j] <= level) {
      left = cross(j, j + 1);
      break;
    }
  }
  for (std::size_t j = peak.index + 1; j < y.size(); ++j) {
    if (y[j] <= level) {
      right = cross(j, j - 1);
      break;
    }
  }
  return right - left;
}

std::vector<Peak> dominant_peaks(const std::vector<double>& y, double relative) {
  auto peaks = find_peaks(y);
  double top = 0.0;
  for (const auto& p : peaks) top = std::max(top, p.prominence);
  std::erase_if(peaks, [&](const Peak& p) { return p.prominence < relative * top; });
  return peaks;
}

FeatureMetrics feature_metrics(const std::vector<double>& x, const std::vector<double>& y,
                               double x_lo, double x_hi) {
  if (x.size() != y.size()) throw ConfigError("feature_metrics: x and y sizes differ");
  std::vector<double> wx, wy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= x_lo && x[i] <= x_hi && std::isfinite(y[i])) {
      wx.push_back(x[i]);
      wy.push_back(y[i]);
    }
  }
  FeatureMetrics out;
  if (wx.size() < 3) return out;
  const double x0 = wx.front(), x1 = wx.back(), y0 = wy.front(), y1 = wy.back();
  std::vector<double> f(wx.size());
  for (std::size_t i = 0; i < wx.size(); ++i) f[i] = wy[i] - (y0 + (y1 - y0) * (wx[i] - x0) / (x1 - x0));
  std::size_t arg = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (std::abs(f[i]) > std::abs(f[arg])) arg = i;
  }
  out.center = wx[arg];
  out.amplitude = std::abs(f[arg]);
  if (out.amplitude == 0.0) return out;
  const double sign = f[arg] > 0 ? 1.0 : -1.0;
  const double half = 0.5 * out.amplitude;
  bool left_ok = false, right_ok = false;
  double xl = wx.front(), xr = wx.back();
  for (std::size_t j = arg; j-- > 0;) {
    if (sign * f[j] <= half) {
      const double a = sign * f[j], b = sign * f[j + 1];
      xl = wx[j] + (half - a) / (b - a) * (wx[j + 1] - wx[j]);
      left_ok = true;
      break;
    }
  }
  for (std::size_t j = arg + 1; j < f.size(); ++j) {
    if (sign * f[j] <= half) {
      const double a = sign * f[j - 1], b = sign * f[j];
      xr = wx[j - 1] + (a - half) / (a - b) * (wx[j] - wx[j - 1]);
      right_ok = true;
      break;
    }
  }
  out.fwhm = xr - xl;
  out.width_resolved = left_ok && right_ok;
  return out;
}

std::string to_string(SignalProvenance provenance) {
  return provenance == SignalProvenance::MaxAligned ? "max_aligned" : "volume_integrated";
}

}  // namespace rpnv
