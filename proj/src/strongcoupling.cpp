#include "rpnv/strongcoupling.hpp"

#include "rpnv/errors.hpp"
#include "rpnv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rpnv {

namespace {

using cd = std::complex<double>;

// Within each run of eigenvalues closer than tol, rotate the eigenvectors to diagonalize the
// projected coupling so that pairing across manifolds does not depend on solver noise.
void align_degenerate(const Eigen::VectorXd& energies, OperatorMatrix& vectors,
                      const OperatorMatrix& coupling, double tol) {
  const Eigen::Index d = energies.size();
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index end = start + 1;
    while (end < d && energies(end) - energies(end - 1) < tol) ++end;
    const Eigen::Index size = end - start;
    if (size > 1) {
      const OperatorMatrix block = vectors.middleCols(start, size);
      const OperatorMatrix projected = block.adjoint() * coupling * block;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (projected + projected.adjoint()));
      vectors.middleCols(start, size) = block * es.eigenvectors();
    }
    start = end;
  }
}

}  // namespace

std::vector<int> hungarian_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != cost.rows()) throw ConfigError("hungarian_assignment: cost must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials u (rows), v (cols); p[j] = row matched to column j (1-based, 0 = free).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

LevelStructure level_structure(const RadicalPairConfig& cfg, const FieldConfig& field,
                               const CouplingGeometry& geom, const SensorParams& sensor,
                               const LevelOptions& options) {
  const SpinOperators ops(cfg.layout());
  return level_structure(ops, cfg, field, geom, sensor, options);
}

LevelStructure level_structure(const SpinOperators& ops, const RadicalPairConfig& cfg,
                               const FieldConfig& field, const CouplingGeometry& geom,
                               const SensorParams& sensor, const LevelOptions& options) {
  cfg.validate();
  if (!options.allow_weak_regime) {
    const auto cls = classify_regime(geom.g_eff, sensor);
    if (cls.regime != Regime::Strong) {
      std::ostringstream msg;
      msg << "level_structure requires the strong regime: g_eff/2π = " << geom.g_eff / constants::kTwoPi
          << " Hz does not exceed Γ = " << sensor.gamma_hz() << " Hz";
      throw PhysicsError(msg.str());
    }
  }
  const OperatorMatrix h0 = build_rp_hamiltonian(ops, cfg, field, geom.rotation);
  const OperatorMatrix hc = build_coupling_hamiltonian(geom, ops);
  const OperatorMatrix h1 = h0 + hc;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(h0), es1(h1);
  if (es0.info() != Eigen::Success || es1.info() != Eigen::Success) {
    throw NumericalError("level_structure: eigensolver failed");
  }
  LevelStructure out;
  out.nuclei_count = ops.layout().nuclei_count();
  out.energies0 = es0.eigenvalues();
  out.vectors0 = es0.eigenvectors();
  Eigen::VectorXd e1 = es1.eigenvalues();
  OperatorMatrix v1 = es1.eigenvectors();
  align_degenerate(out.energies0, out.vectors0, hc, options.degeneracy_tol);
  align_degenerate(e1, v1, hc, options.degeneracy_tol);

  const Eigen::MatrixXd overlap = (out.vectors0.adjoint() * v1).cwiseAbs2();
  const auto match = hungarian_assignment(-overlap);
  const Eigen::Index d = overlap.rows();
  out.energies1.resize(d);
  out.vectors1.resize(d, d);
  out.overlaps.resize(d);
  out.transition_hz.resize(static_cast<std::size_t>(d));
  for (Eigen::Index n = 0; n < d; ++n) {
    const int m = match[static_cast<std::size_t>(n)];
    out.energies1(n) = e1(m);
    out.vectors1.col(n) = v1.col(m);
    out.overlaps(n) = overlap(n, m);
    out.transition_hz[static_cast<std::size_t>(n)] = (e1(m) - out.energies0(n)) / constants::kTwoPi;
  }
  return out;
}

PeakSet count_resolved_peaks(const std::vector<double>& transition_hz, double gamma_hz,
                             const std::vector<double>* amplitudes, double amplitude_floor) {
  if (!(gamma_hz > 0.0)) throw ConfigError("count_resolved_peaks: resolution must be > 0");
  if (amplitudes && amplitudes->size() != transition_hz.size()) {
    throw ConfigError("count_resolved_peaks: amplitude list size mismatch");
  }
  std::vector<std::size_t> order(transition_hz.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return transition_hz[a] < transition_hz[b]; });
  PeakSet out;
  out.resolution_hz = gamma_hz;
  std::vector<double> cluster_amp;
  double sum = 0.0;
  for (std::size_t idx : order) {
    const double f = transition_hz[idx];
    const double a = amplitudes ? (*amplitudes)[idx] : 0.0;
    if (out.centers_hz.empty() || f - out.centers_hz.back() > gamma_hz) {
      out.centers_hz.push_back(f);
      out.multiplicity.push_back(1);
      cluster_amp.push_back(a);
      sum = f;
    } else {
      sum += f;
      ++out.multiplicity.back();
      out.centers_hz.back() = sum / static_cast<double>(out.multiplicity.back());
      cluster_amp.back() = std::max(cluster_amp.back(), a);
    }
  }
  if (amplitudes) {
    PeakSet kept;
    kept.resolution_hz = gamma_hz;
    for (std::size_t c = 0; c < out.centers_hz.size(); ++c) {
      if (cluster_amp[c] >= amplitude_floor) {
        kept.centers_hz.push_back(out.centers_hz[c]);
        kept.multiplicity.push_back(out.multiplicity[c]);
      }
    }
    return kept;
  }
  return out;
}

PeakSet count_resolved_peaks(const LevelStructure& levels, double gamma_hz) {
  return count_resolved_peaks(levels.transition_hz, gamma_hz);
}

Populations populations(const DensityMatrix& rho, const LevelStructure& levels) {
  Populations p;
  p.manifold0 = (levels.vectors0.adjoint() * rho * levels.vectors0).diagonal().real();
  p.manifold1 = (levels.vectors1.adjoint() * rho * levels.vectors1).diagonal().real();
  return p;
}

namespace {

ContrastSeries contrast_on_grid(const SpinOperators& ops, const RadicalPairConfig& cfg,
                                const FieldConfig& field, const Rotation& rotation,
                                const std::vector<LevelStructure>& levels,
                                const std::vector<double>& weights, const TimeGrid& grid,
                                DecayConvention decay) {
  const Propagator prop(build_rp_hamiltonian(ops, cfg, field, rotation),
                        effective_decay_rate(cfg.recombination_rate, decay));
  const DensityMatrix rho0 = initial_state(cfg.initial_state, ops.layout());
  const auto d = static_cast<std::size_t>(ops.dimension());
  ContrastSeries out;
  out.grid = grid;
  out.contrast.assign(d, std::vector<double>(grid.samples, 0.0));
  out.population_sum0.assign(grid.samples, 0.0);
  out.population_sum1.assign(grid.samples, 0.0);
  for (std::size_t j = 0; j < grid.samples; ++j) {
    const DensityMatrix rho = prop.evolve(rho0, grid.at(j));
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto pop = populations(rho, levels[l]);
      for (std::size_t n = 0; n < d; ++n) {
        const auto ni = static_cast<Eigen::Index>(n);
        out.contrast[n][j] += weights[l] * (pop.manifold1(ni) - pop.manifold0(ni));
      }
      if (l == 0) {
        out.population_sum0[j] = pop.manifold0.sum();
        out.population_sum1[j] = pop.manifold1.sum();
      }
    }
  }
  return out;
}

}  // namespace

ContrastSeries peak_contrast(const RadicalPairConfig& cfg, const FieldConfig& field,
                             const CouplingGeometry& geom, const TimeGrid& grid,
                             const SensorParams& sensor, const LevelOptions& options,
                             DecayConvention decay) {
  const SpinOperators ops(cfg.layout());
  std::vector<LevelStructure> levels{level_structure(ops, cfg, field, geom, sensor, options)};
  return contrast_on_grid(ops, cfg, field, geom.rotation, levels, {1.0}, grid, decay);
}

ContrastSeries peak_contrast_volume(const RadicalPairConfig& cfg, const FieldConfig& field,
                                    const Rotation& rotation, const TimeGrid& grid,
                                    const SensorParams& sensor, int radial_nodes,
                                    DecayConvention decay) {
  sensor.validate();
  if (radial_nodes < 2) throw ConfigError("peak_contrast_volume: need >= 2 radial nodes");
  const SpinOperators ops(cfg.layout());
  const auto gl = gauss_legendre(radial_nodes, sensor.r1_nm, sensor.r2_nm);
  LevelOptions opts;
  opts.allow_weak_regime = true;
  std::vector<LevelStructure> levels;
  std::vector<double> weights;
  // ξ ∫ r² dr ∫₀^{π/2} sinα dα ∫₀^{2π} dβ, lengths in nm so ξ stays in nm⁻³.
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const auto geom = coupling_geometry(gl.nodes[i], field.theta, field.phi, rotation);
    levels.push_back(level_structure(ops, cfg, field, geom, sensor, opts));
    weights.push_back(sensor.density_per_nm3 * constants::kTwoPi * gl.weights[i] * gl.nodes[i] *
                      gl.nodes[i]);
  }
  return contrast_on_grid(ops, cfg, field, rotation, levels, weights, grid, decay);
}

}  // namespace rpnv
