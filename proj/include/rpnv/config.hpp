#pragma once

// Experiment configuration: a JSON document whose sections mirror the domain types.
// Values keep their file units (mT, degrees, µs, nm); conversion happens in the build_*()
// helpers. Parsing is strict: unknown keys and wrong types are rejected with a JSON path.

#include "rpnv/dynamics.hpp"
#include "rpnv/ensemble.hpp"
#include "rpnv/hamiltonian.hpp"
#include "rpnv/signal.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpnv {

struct NucleusSpec {
  std::string label;
  std::string spin = "1/2";                  // "1/2" or "1"
  std::optional<Eigen::Matrix3d> tensor_mT;  // full tensor, or …
  std::optional<Eigen::Vector3d> principal_mT;  // … principal components rotated by euler_deg
  Eigen::Vector3d euler_deg = Eigen::Vector3d::Zero();

  Nucleus build() const;
  bool operator==(const NucleusSpec&) const = default;
};

struct RadicalPairSpec {
  std::vector<NucleusSpec> radical1;
  std::vector<NucleusSpec> radical2;
  double j_exchange_mT = 0.0;
  std::optional<double> dipolar_r_nm;
  std::optional<Eigen::Matrix3d> dipolar_tensor_mT;
  double recombination_rate_per_s = 2e5;
  std::string initial_state = "singlet";     // "singlet" | "triplet_zero"
  Eigen::Vector3d orientation_euler_deg = Eigen::Vector3d::Zero();  // R_ζ

  RadicalPairConfig build() const;
  Rotation orientation() const;
  bool operator==(const RadicalPairSpec&) const = default;
};

struct FieldSpec {
  double magnitude_mT = 0.05;
  double theta_deg = 0.0;
  double phi_deg = 0.0;

  FieldConfig build() const;
  bool operator==(const FieldSpec&) const = default;
};

struct SensorSpec {
  double t2_us = 10.0;
  double depth_nm = 5.0;
  double r1_nm = 5.0;
  double r2_nm = 20.0;
  double density_per_nm3 = 5e-2;

  SensorParams build() const;
  bool operator==(const SensorSpec&) const = default;
};

struct GeometrySpec {
  double r_nm = 10.0;
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  bool operator==(const GeometrySpec&) const = default;
};

struct TimeGridSpec {
  std::optional<double> t_max_us;
  std::optional<std::size_t> samples;
  std::size_t min_samples = 4096;
  bool operator==(const TimeGridSpec&) const = default;
};

struct SweepSpec {
  std::optional<std::vector<double>> b_values_mT;
  double b_min_mT = 0.01;
  double b_max_mT = 50.0;
  std::size_t b_points = 60;
  std::string b_spacing = "log";  // "log" | "linear"
  bool densify = false;
  bool allow_tilted = false;
  std::optional<std::vector<double>> theta_values_deg;
  double theta_min_deg = 0.0;
  double theta_max_deg = 180.0;
  double theta_step_deg = 1.0;
  bool normalize = true;

  std::vector<double> field_grid_mT() const;
  std::vector<double> theta_grid_rad() const;
  bool operator==(const SweepSpec&) const = default;
};

struct SignalSpec {
  std::string mode = "max_aligned";  // "max_aligned" | "volume" | "single_molecule"
  std::string orientation = "aligned";  // "aligned" | "fixed" | "radial" (volume mode)
  int alpha_nodes = 16;
  int beta_nodes = 16;
  bool operator==(const SignalSpec&) const = default;
};

struct EnsembleConfig {
  std::size_t n_realizations = 50;
  std::vector<std::string> modes{"aligned", "random_euler"};
  double r_min_nm = 5.0;
  double r_max_nm = 20.0;
  std::string count_mode = "poisson";  // "poisson" | "fixed"
  std::size_t fixed_count = 100;
  std::size_t max_count = 100;
  bool uniform_angles = false;

  EnsembleSpec build(OrientationMode mode, std::uint64_t seed, double density) const;
  bool operator==(const EnsembleConfig&) const = default;
};

struct StrongCouplingSpec {
  bool allow_weak = false;
  double amplitude_floor = 0.0;
  bool contrast = false;
  std::size_t contrast_samples = 256;
  bool operator==(const StrongCouplingSpec&) const = default;
};

struct CouplingMapSpec {
  double r_min_nm = 5.0;
  double r_max_nm = 30.0;
  std::size_t r_points = 26;
  std::size_t theta_points = 91;
  bool operator==(const CouplingMapSpec&) const = default;
};

/// Named override applied on top of the base radical pair (one output curve each).
struct VariantSpec {
  std::string label;
  std::optional<double> j_exchange_mT;
  std::optional<double> lifetime_us;
  std::optional<Eigen::Vector3d> principal_mT;  // replaces every nucleus' principal components

  RadicalPairSpec apply(const RadicalPairSpec& base) const;
  bool operator==(const VariantSpec&) const = default;
};

enum class ExperimentKind { TimeTrace, FieldSweep, AngleSweep, Ensemble, PeakCount, CouplingMap };

struct ExperimentConfig {
  std::string name = "custom";
  std::string description;
  ExperimentKind kind = ExperimentKind::TimeTrace;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string decay_convention = "rate_k";  // "rate_k" | "rate_2k"
  RadicalPairSpec radical_pair;
  FieldSpec field;
  SensorSpec sensor;
  GeometrySpec geometry;
  TimeGridSpec time_grid;
  SweepSpec sweep;
  SignalSpec signal;
  EnsembleConfig ensemble;
  StrongCouplingSpec strong_coupling;
  CouplingMapSpec coupling_map;
  std::vector<VariantSpec> variants;

  DecayConvention decay() const;
  EvolutionOptions evolution() const;
  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& s);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical form: every field written out, object keys sorted.
nlohmann::json to_json(const ExperimentConfig& cfg);
std::string canonical_text(const ExperimentConfig& cfg);

/// Closest candidate by edit distance; empty when nothing is reasonably close.
std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace rpnv
