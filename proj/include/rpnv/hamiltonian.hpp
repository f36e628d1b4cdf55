#pragma once

#include "rpnv/spincore.hpp"
#include "rpnv/units.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace rpnv {

struct PhysicalConstants {
  double mu0 = constants::kMu0;
  double hbar = constants::kHbar;
  double gamma_e = constants::kGammaE;
};

struct NVParams {
  double d_zfs_hz = 2.87e9;
  double a_n_parallel_hz = -2.16e6;
  double gamma_e = constants::kGammaE;
};

struct Nucleus {
  SpinSpecies species;
  CouplingTensor hyperfine_mT = CouplingTensor::Zero();

  bool operator==(const Nucleus&) const = default;
};

enum class ElectronState { Singlet, TripletZero };

/// Inter-radical dipolar coupling, given either as a full tensor or as a point-dipole distance.
struct DipolarCoupling {
  std::optional<CouplingTensor> tensor_mT;
  std::optional<double> r_rp_nm;

  /// S₁·D·S₂ tensor in mT. Zero when neither entry is set.
  CouplingTensor tensor() const;

  bool operator==(const DipolarCoupling&) const = default;
};

struct RadicalPairConfig {
  std::vector<Nucleus> radical1;
  std::vector<Nucleus> radical2;
  double j_exchange_mT = 0.0;
  DipolarCoupling dipolar;
  double recombination_rate = 2e5;  // s⁻¹
  ElectronState initial_state = ElectronState::Singlet;

  SpinSystemLayout layout() const;
  /// Throws ConfigError / PhysicsError for out-of-range parameters.
  void validate() const;
  bool operator==(const RadicalPairConfig&) const = default;
};

struct FieldConfig {
  double magnitude_mT = 0.0;
  double theta = 0.0;  // rad, angle from the NV axis
  double phi = 0.0;    // rad

  Eigen::Vector3d vector_mT() const;
  void validate() const;
  bool operator==(const FieldConfig&) const = default;
};

/// NV–RP placement and the coupling coefficients that follow from it.
struct CouplingGeometry {
  double r_nm = 10.0;
  double d_r = 0.0;                     // rad/s, -μ₀γₑ²ħ/(4πr³)
  Eigen::Vector3d d_c = Eigen::Vector3d::Zero();
  double g_eff = 0.0;                   // rad/s
  Rotation rotation;                    // RP frame -> NV frame
  double alpha = 0.0;                   // position polar angle
  double beta = 0.0;                    // position azimuth
};

struct SensorParams {
  double t2 = 10e-6;          // s
  double depth_nm = 5.0;
  double r1_nm = 5.0;
  double r2_nm = 20.0;
  double density_per_nm3 = 5e-2;

  /// Dephasing-limited linewidth Γ = 1/(πT₂), in Hz.
  double gamma_hz() const;
  void validate() const;

  /// Shell [r - δ/2, r + δ/2] holding exactly one molecule at the given density. The
  /// volume formula then reduces to the point-dipole signal of one RP at distance r.
  static SensorParams single_molecule(double r_nm, double density_per_nm3, double t2 = 10e-6);

  bool operator==(const SensorParams&) const = default;
};

/// Embedded electron operators for one layout, built once and shared by every Hamiltonian
/// evaluated on that layout.
class SpinOperators {
 public:
  explicit SpinOperators(SpinSystemLayout layout);

  const SpinSystemLayout& layout() const { return layout_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(layout_.total_dimension()); }
  const OperatorMatrix& s1(int i) const { return s1_[static_cast<std::size_t>(i)]; }
  const OperatorMatrix& s2(int i) const { return s2_[static_cast<std::size_t>(i)]; }
  /// S₁ᵢ + S₂ᵢ
  const OperatorMatrix& total(int i) const { return total_[static_cast<std::size_t>(i)]; }
  const OperatorMatrix& s1_dot_s2() const { return s1_dot_s2_; }
  /// S₁ᵢS₂ⱼ
  OperatorMatrix s1_s2(int i, int j) const;
  /// |S₀⟩⟨S₀| ⊗ I_nuc
  const OperatorMatrix& singlet_projector() const { return singlet_projector_; }

  /// Σᵢⱼ Aᵢⱼ Sₑᵢ Iₙⱼ, with A already in rad/s.
  OperatorMatrix hyperfine_term(int electron, std::size_t nucleus_site,
                                const Eigen::Matrix3d& coupling) const;
  void add_hyperfine_term(OperatorMatrix& h, int electron, std::size_t nucleus_site,
                          const Eigen::Matrix3d& coupling) const;

 private:
  SpinSystemLayout layout_;
  std::array<OperatorMatrix, 3> s1_, s2_, total_;
  OperatorMatrix s1_dot_s2_;
  OperatorMatrix singlet_projector_;
};

/// Two-level NV Hamiltonian on {|0⟩, |+1⟩} ⊗ ¹⁴N, in rad/s.
OperatorMatrix build_nv_hamiltonian(const NVParams& nv, double b0z_mT);

/// Secular inter-radical dipolar coupling D_s(r_RP) in rad/s.
double secular_dipolar_coupling(double r_rp_nm, const PhysicalConstants& pc = {});

/// NV–RP dipolar prefactor D_r(r) in rad/s.
double dipolar_prefactor(double r_nm, const PhysicalConstants& pc = {});

OperatorMatrix build_rp_hamiltonian(const SpinOperators& ops, const RadicalPairConfig& cfg,
                                    const FieldConfig& field, const Rotation& rotation);
OperatorMatrix build_rp_hamiltonian(const RadicalPairConfig& cfg, const FieldConfig& field,
                                    const Rotation& rotation);

struct SecularSplit {
  OperatorMatrix diagonal;     // electron-ST diagonal part
  OperatorMatrix nondiagonal;  // H_RP - diagonal
};

SecularSplit split_secular(const SpinOperators& ops, const RadicalPairConfig& cfg,
                           const FieldConfig& field, const Rotation& rotation);
SecularSplit split_secular(const RadicalPairConfig& cfg, const FieldConfig& field,
                           const Rotation& rotation);

/// Geometric factors d_c for a field direction (θ, φ).
Eigen::Vector3d coupling_factors(double theta, double phi);

CouplingGeometry coupling_geometry(double r_nm, double theta, double phi,
                                   const Rotation& rotation = Rotation::identity(),
                                   double alpha = 0.0, double beta = 0.0);

/// D_r Σᵢ d_cᵢ (S₁ᵢ + S₂ᵢ) on the RP space, rad/s.
OperatorMatrix build_coupling_hamiltonian(const CouplingGeometry& geom, const SpinOperators& ops);
OperatorMatrix build_coupling_hamiltonian(const CouplingGeometry& geom,
                                          const SpinSystemLayout& layout);

enum class Regime { Weak, Strong };

struct RegimeClassification {
  Regime regime = Regime::Weak;
  bool on_boundary = false;  // g_eff/2π == Γ, resolved as Weak
};

/// Compares g_eff/2π against Γ = 1/(πT₂), both in Hz.
RegimeClassification classify_regime(double g_eff, const SensorParams& sensor);

std::string to_string(Regime regime);
std::string to_string(ElectronState state);

}  // namespace rpnv
