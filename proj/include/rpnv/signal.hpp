#pragma once

#include "rpnv/dynamics.hpp"
#include "rpnv/hamiltonian.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace rpnv {

/// Time-grid and decay settings shared by every evolution in a sweep.
struct EvolutionOptions {
  DecayConvention decay = DecayConvention::RateK;
  std::size_t min_samples = 4096;
  std::optional<TimeGrid> grid;  // overrides the default 5/k grid

  double decay_rate(const RadicalPairConfig& cfg) const {
    return effective_decay_rate(cfg.recombination_rate, decay);
  }
  TimeGrid grid_for(const Propagator& prop) const;
};

/// RP-frame orientation relative to the NV frame as a function of position angles.
struct OrientationModel {
  enum class Kind { Aligned, Fixed, Radial };
  Kind kind = Kind::Aligned;
  Rotation fixed;  // used when kind == Fixed

  /// Radial: R = Rz(β)·Ry(α), the RP z axis points along the NV→RP direction.
  Rotation rotation_at(double alpha, double beta) const;
  bool position_dependent() const { return kind == Kind::Radial; }
  bool beta_dependent() const { return kind == Kind::Radial; }

  static OrientationModel aligned() { return {}; }
  static OrientationModel fixed_rotation(const Rotation& r) { return {Kind::Fixed, r}; }
  static OrientationModel radial() { return {Kind::Radial, Rotation::identity()}; }
};

struct QuadratureSpec {
  int alpha_nodes = 16;
  int beta_nodes = 16;  // only used for β-dependent orientation models
  OrientationModel orientation;
};

/// Gauss–Legendre nodes and weights on [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n, double a, double b);

enum class SignalProvenance { MaxAligned, VolumeIntegrated };

struct SignalTrace {
  TimeGrid grid;
  std::array<std::vector<double>, 3> x;  // Tesla
  SignalProvenance provenance = SignalProvenance::MaxAligned;
};

struct SignalSpectrum {
  std::vector<double> freq_hz;              // 0 … Nyquist
  std::array<std::vector<double>, 3> magnitude;  // |DFT|·dt, T·s
};

/// Tesla per unit ⟨S̃⟩ for the aligned volume signal: ξ μ₀ γₑ ħ/2 · ln(r₂/r₁).
double signal_prefactor(const SensorParams& sensor, const PhysicalConstants& pc = {});

/// Point-dipole field of one RP at distance r per unit ⟨S̃⟩: μ₀ γₑ ħ /(4π r³), Tesla.
double single_molecule_prefactor(double r_nm, const PhysicalConstants& pc = {});

SignalTrace signal_max(const ObservableSeries& series, const SensorParams& sensor);

/// Volume-integrated trace. Radial integral is analytic; α uses Gauss–Legendre on [0, π/2];
/// β contributes 2π unless the orientation model depends on it.
SignalTrace signal_volume(const RadicalPairConfig& cfg, const FieldConfig& field,
                          const SensorParams& sensor, const QuadratureSpec& quadrature,
                          const EvolutionOptions& evolution = {});

/// Sample mean of each component.
Eigen::Vector3d time_integrated(const SignalTrace& trace);

/// One-sided DFT magnitude of each component (FFTW r2c), scaled by dt.
SignalSpectrum spectrum(const SignalTrace& trace);

/// Evolved observables of one aligned-or-rotated molecule.
ObservableSeries simulate_series(const SpinOperators& ops, const RadicalPairConfig& cfg,
                                 const FieldConfig& field, const Rotation& rotation,
                                 const EvolutionOptions& evolution = {});

/// Closed-form time averages for one field/orientation. Values are per unit d_c.
struct PointAverages {
  Eigen::Vector3d mean_spin = Eigen::Vector3d::Zero();  // mean ⟨S₁ᵢ + S₂ᵢ⟩
  double singlet_yield = 0.0;
  double spectral_range = 0.0;
};
PointAverages evaluate_point(const SpinOperators& ops, const RadicalPairConfig& cfg,
                             const FieldConfig& field, const Rotation& rotation,
                             const EvolutionOptions& evolution = {});

enum class SweepVariable { FieldMagnitude, Theta };

struct SweepPoint {
  double value = 0.0;                         // mT or rad
  Eigen::Vector3d x_int = Eigen::Vector3d::Zero();  // X_i^I, Tesla
  std::array<std::optional<double>, 3> normalized;  // X_i^I / d_cᵢ where |d_cᵢ| > ε
  double singlet_yield = 0.0;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::FieldMagnitude;
  std::vector<SweepPoint> points;

  std::vector<double> values() const;
  std::vector<double> component(int i) const;
  std::vector<double> singlet_yields() const;
};

struct SweepOptions {
  EvolutionOptions evolution;
  QuadratureSpec quadrature;       // orientation = Aligned uses the closed aligned formula
  unsigned threads = 1;
  double normalize_epsilon = 1e-3;
  bool allow_tilted_magnitude_sweep = false;
  bool densify = false;            // second pass, 5× around local maxima of |X_z^I|
};

/// Logarithmic grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> default_field_grid();  // 10 µT … 50 mT, 60 points, mT
std::vector<double> default_theta_grid();  // 0° … 180°, 1° steps, rad

SweepResult sweep_field_magnitude(const RadicalPairConfig& cfg, double theta, double phi,
                                  const std::vector<double>& b_grid_mT, const SensorParams& sensor,
                                  const SweepOptions& options = {});

SweepResult sweep_field_angle(const RadicalPairConfig& cfg, double magnitude_mT,
                              const std::vector<double>& theta_grid, double phi,
                              const SensorParams& sensor, bool normalize,
                              const SweepOptions& options = {});

/// Local maxima with topographic prominence, for curve-shape checks.
struct Peak {
  std::size_t index = 0;
  double value = 0.0;
  double prominence = 0.0;
};
std::vector<Peak> find_peaks(const std::vector<double>& y);

/// Width of `peak` at half its prominence, with linear interpolation of the crossings.
/// Returns NaN when a crossing lies outside the data.
double peak_width(const std::vector<double>& x, const std::vector<double>& y, const Peak& peak);

/// Peaks whose prominence is at least `relative` times the largest prominence.
std::vector<Peak> dominant_peaks(const std::vector<double>& y, double relative = 0.5);

/// Height and width of a localized feature on (x, y) inside [x_lo, x_hi], measured against
/// the straight line joining the window endpoints.
struct FeatureMetrics {
  double center = 0.0;
  double amplitude = 0.0;
  double fwhm = 0.0;
  bool width_resolved = false;  // half-maximum reached on both sides inside the window
};
FeatureMetrics feature_metrics(const std::vector<double>& x, const std::vector<double>& y,
                               double x_lo, double x_hi);

std::string to_string(SignalProvenance provenance);

}  // namespace rpnv
