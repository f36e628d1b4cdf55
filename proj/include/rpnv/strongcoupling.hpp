#pragma once

#include "rpnv/dynamics.hpp"
#include "rpnv/hamiltonian.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace rpnv {

/// Minimum-cost perfect matching on a square cost matrix. Returns column assigned to each row.
std::vector<int> hungarian_assignment(const Eigen::MatrixXd& cost);

/// Eigenpairs of the NV |0⟩ and |1⟩ manifold generators H_RP and H_RP + D_r ΣS̃ᵢ.
/// Column n of vectors1 is the |1⟩-manifold state paired with column n of vectors0.
struct LevelStructure {
  Eigen::VectorXd energies0;       // rad/s
  OperatorMatrix vectors0;
  Eigen::VectorXd energies1;       // rad/s, reordered by pairing
  OperatorMatrix vectors1;
  Eigen::VectorXd overlaps;        // |⟨ψ_n|ψ'_n⟩|²
  std::vector<double> transition_hz;  // f_n = (E'_n - E_n)/2π
  std::size_t nuclei_count = 0;

  std::size_t transition_count() const { return transition_hz.size(); }
};

struct LevelOptions {
  bool allow_weak_regime = false;   // skip the g_eff > Γ precondition
  double degeneracy_tol = 1e-6;     // rad/s
};

LevelStructure level_structure(const RadicalPairConfig& cfg, const FieldConfig& field,
                               const CouplingGeometry& geom, const SensorParams& sensor,
                               const LevelOptions& options = {});
LevelStructure level_structure(const SpinOperators& ops, const RadicalPairConfig& cfg,
                               const FieldConfig& field, const CouplingGeometry& geom,
                               const SensorParams& sensor, const LevelOptions& options = {});

struct PeakSet {
  std::vector<double> centers_hz;
  std::vector<std::size_t> multiplicity;
  double resolution_hz = 0.0;

  std::size_t count() const { return centers_hz.size(); }
};

/// Greedy clustering in ascending frequency: a new cluster opens when a transition lies more
/// than Γ above the current cluster center (the member mean). When `amplitudes` is given,
/// clusters whose largest member amplitude is below `amplitude_floor` are dropped.
PeakSet count_resolved_peaks(const std::vector<double>& transition_hz, double gamma_hz,
                             const std::vector<double>* amplitudes = nullptr,
                             double amplitude_floor = 0.0);
PeakSet count_resolved_peaks(const LevelStructure& levels, double gamma_hz);

/// ⟨P_ψn⟩ and ⟨P_ψ'n⟩ for a given density matrix.
struct Populations {
  Eigen::VectorXd manifold0;
  Eigen::VectorXd manifold1;
};
Populations populations(const DensityMatrix& rho, const LevelStructure& levels);

/// C_n(t) = ⟨P_ψ'n⟩(t) - ⟨P_ψn⟩(t), ρ evolved under H_RP (NV held in |0⟩).
struct ContrastSeries {
  TimeGrid grid;
  std::vector<std::vector<double>> contrast;  // [transition][time]
  std::vector<double> population_sum0;        // Σ_n ⟨P_ψn⟩(t)
  std::vector<double> population_sum1;        // Σ_n ⟨P_ψ'n⟩(t)
};

ContrastSeries peak_contrast(const RadicalPairConfig& cfg, const FieldConfig& field,
                             const CouplingGeometry& geom, const TimeGrid& grid,
                             const SensorParams& sensor, const LevelOptions& options = {},
                             DecayConvention decay = DecayConvention::RateK);

/// Shell-integrated contrast ξ ∫∫∫ C_n(r) r² sinα dr dα dβ for a position-independent frame.
/// The |0⟩ manifold does not depend on r, so index n is the same at every radial node.
ContrastSeries peak_contrast_volume(const RadicalPairConfig& cfg, const FieldConfig& field,
                                    const Rotation& rotation, const TimeGrid& grid,
                                    const SensorParams& sensor, int radial_nodes = 16,
                                    DecayConvention decay = DecayConvention::RateK);

}  // namespace rpnv
