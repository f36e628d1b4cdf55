#pragma once

#include "rpnv/hamiltonian.hpp"
#include "rpnv/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rpnv {

enum class OrientationMode { Aligned, RandomEuler };
enum class CountMode { Poisson, Fixed };

struct EnsembleSpec {
  std::size_t n_realizations = 50;
  OrientationMode orientation = OrientationMode::Aligned;
  double r_min_nm = 5.0;
  double r_max_nm = 20.0;
  std::uint64_t seed = 1;
  CountMode count_mode = CountMode::Poisson;
  std::size_t fixed_count = 100;
  std::size_t max_count = 100;     // Poisson draws are clamped to this
  double density_per_nm3 = 5e-2;
  bool uniform_angles = false;     // draw Euler angles uniformly instead of Haar rotations

  /// Hemispherical shell volume between r_min and r_max, nm³.
  double shell_volume_nm3() const;
  void validate() const;
  bool operator==(const EnsembleSpec&) const = default;
};

/// Per-realization generator derived from (seed, index) so realizations are independent of
/// evaluation order.
std::mt19937_64 realization_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng);

/// Haar-random rotation from a uniform unit quaternion.
Rotation haar_rotation(std::mt19937_64& rng);

/// Molecules of one realization. d_c is evaluated for the given field direction.
std::vector<CouplingGeometry> sample_realization(const EnsembleSpec& spec, std::uint64_t index,
                                                 double theta = 0.0, double phi = 0.0);

struct EnsemblePoint {
  double value = 0.0;  // mT
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();      // Tesla
  Eigen::Vector3d variance = Eigen::Vector3d::Zero();  // Tesla², across realizations
  std::vector<Eigen::Vector3d> realizations;           // per-realization X^I
};

struct EnsembleStatistics {
  OrientationMode orientation = OrientationMode::Aligned;
  std::uint64_t seed = 0;
  std::vector<EnsemblePoint> points;
};

/// Field-magnitude sweep of ensemble-summed X^I. Each molecule contributes
/// μ₀γₑħ/(4πr³) · d_c ∘ mean⟨S₁ + S₂⟩ evaluated in its own frame.
EnsembleStatistics ensemble_sweep(const RadicalPairConfig& cfg, const std::vector<double>& b_grid_mT,
                                  double theta, double phi, const EnsembleSpec& spec,
                                  const EvolutionOptions& evolution = {}, unsigned threads = 1);

std::string to_string(OrientationMode mode);

}  // namespace rpnv
