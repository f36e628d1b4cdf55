#include "rpnv/ensemble.hpp"

#include "rpnv/errors.hpp"
#include "rpnv/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rpnv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double EnsembleSpec::shell_volume_nm3() const {
  return constants::kTwoPi / 3.0 * (r_max_nm * r_max_nm * r_max_nm - r_min_nm * r_min_nm * r_min_nm);
}

void EnsembleSpec::validate() const {
  if (n_realizations < 1) throw ConfigError("ensemble: n_realizations must be >= 1");
  if (!(r_min_nm > 0.0)) throw PhysicsError("ensemble: r_min must be > 0");
  if (r_max_nm < r_min_nm) throw ConfigError("ensemble: r_range must be ordered (r_min <= r_max)");
  if (!(density_per_nm3 > 0.0)) throw ConfigError("ensemble: density must be > 0");
  if (count_mode == CountMode::Fixed && fixed_count < 1) {
    throw ConfigError("ensemble: fixed_count must be >= 1");
  }
  if (max_count < 1) throw ConfigError("ensemble: max_count must be >= 1");
}

std::mt19937_64 realization_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Rotation haar_rotation(std::mt19937_64& rng) {
  const double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(constants::kTwoPi * u3), a * std::sin(constants::kTwoPi * u2),
                             a * std::cos(constants::kTwoPi * u2), b * std::sin(constants::kTwoPi * u3));
  return Rotation::from_matrix(q.toRotationMatrix());
}

std::vector<CouplingGeometry> sample_realization(const EnsembleSpec& spec, std::uint64_t index,
                                                 double theta, double phi) {
  spec.validate();
  auto rng = realization_rng(spec.seed, index);
  std::size_t count = spec.fixed_count;
  if (spec.count_mode == CountMode::Poisson) {
    std::poisson_distribution<std::size_t> poisson(spec.density_per_nm3 * spec.shell_volume_nm3());
    count = std::min(spec.max_count, std::max<std::size_t>(1, poisson(rng)));
  }
  std::vector<CouplingGeometry> molecules;
  molecules.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    const double r = spec.r_min_nm + (spec.r_max_nm - spec.r_min_nm) * uniform01(rng);
    const double alpha = std::acos(1.0 - uniform01(rng));  // cos α uniform on [0, 1]
    const double beta = constants::kTwoPi * uniform01(rng);
    Rotation rot = Rotation::identity();
    if (spec.orientation == OrientationMode::RandomEuler) {
      if (spec.uniform_angles) {
        const double ea = constants::kTwoPi * uniform01(rng);
        const double eb = constants::kTwoPi * uniform01(rng);
        const double ec = constants::kTwoPi * uniform01(rng);
        rot = euler_rotation(ea, eb, ec);
      } else {
        rot = haar_rotation(rng);
      }
    }
    molecules.push_back(coupling_geometry(r, theta, phi, rot, alpha, beta));
  }
  return molecules;
}

EnsembleStatistics ensemble_sweep(const RadicalPairConfig& cfg, const std::vector<double>& b_grid_mT,
                                  double theta, double phi, const EnsembleSpec& spec,
                                  const EvolutionOptions& evolution, unsigned threads) {
  cfg.validate();
  spec.validate();
  const SpinOperators ops(cfg.layout());
  const Eigen::Vector3d dc = coupling_factors(theta, phi);

  std::vector<std::vector<CouplingGeometry>> realizations(spec.n_realizations);
  for (std::size_t r = 0; r < spec.n_realizations; ++r) {
    realizations[r] = sample_realization(spec, r, theta, phi);
  }
  // Flatten molecules so the expensive evaluations parallelize evenly.
  struct Item {
    std::size_t realization;
    const CouplingGeometry* geom;
  };
  std::vector<Item> items;
  for (std::size_t r = 0; r < realizations.size(); ++r) {
    for (const auto& g : realizations[r]) items.push_back({r, &g});
  }

  EnsembleStatistics stats;
  stats.orientation = spec.orientation;
  stats.seed = spec.seed;
  for (double b : b_grid_mT) {
    const FieldConfig field{b, theta, phi};
    field.validate();
    std::vector<Eigen::Vector3d> mean_spin(items.size());
    if (spec.orientation == OrientationMode::Aligned) {
      // Identical frames: one evaluation serves every molecule.
      const auto p = evaluate_point(ops, cfg, field, Rotation::identity(), evolution);
      for (auto& m : mean_spin) m = p.mean_spin;
    } else {
      parallel_for(items.size(), threads, [&](std::size_t i) {
        mean_spin[i] = evaluate_point(ops, cfg, field, items[i].geom->rotation, evolution).mean_spin;
      });
    }
    EnsemblePoint point;
    point.value = b;
    point.realizations.assign(spec.n_realizations, Eigen::Vector3d::Zero());
    for (std::size_t i = 0; i < items.size(); ++i) {
      point.realizations[items[i].realization] +=
          single_molecule_prefactor(items[i].geom->r_nm) * dc.cwiseProduct(mean_spin[i]);
    }
    const double n = static_cast<double>(spec.n_realizations);
    for (const auto& x : point.realizations) point.mean += x;
    point.mean /= n;
    if (spec.n_realizations > 1) {
      for (const auto& x : point.realizations) point.variance += (x - point.mean).cwiseAbs2();
      point.variance /= (n - 1.0);
    }
    stats.points.push_back(std::move(point));
  }
  return stats;
}

std::string to_string(OrientationMode mode) {
  return mode == OrientationMode::Aligned ? "aligned" : "random_euler";
}

}  // namespace rpnv
