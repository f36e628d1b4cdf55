#pragma once

#include "rpnv/hamiltonian.hpp"
#include "rpnv/spincore.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rpnv {

using DensityMatrix = Eigen::MatrixXcd;

/// How the equal-rate Haberkorn term maps onto the trace decay.
///   RateK : tr ρ(t) = e^{-kt}   (lifetime τ = 1/k)
///   Rate2K: tr ρ(t) = e^{-2kt}  (literal -k{I, ρ})
enum class DecayConvention { RateK, Rate2K };

double effective_decay_rate(double k, DecayConvention convention);

/// Uniform grid t_j = j·dt, j = 0 … samples-1.
struct TimeGrid {
  double dt = 0.0;
  std::size_t samples = 0;

  double at(std::size_t j) const { return dt * static_cast<double>(j); }
  double duration() const { return dt * static_cast<double>(samples); }
  double nyquist_hz() const { return 0.5 / dt; }
  std::vector<double> times() const;

  static TimeGrid uniform(double t_max, std::size_t samples);
  bool operator==(const TimeGrid&) const = default;
};

/// T_max = 5/k with at least `min_samples` points, grown until dt < π/spectral_range with
/// 25 % headroom. k = 0 falls back to T_max = 25 µs.
TimeGrid default_time_grid(double decay_rate, double spectral_range,
                           std::size_t min_samples = 4096);

DensityMatrix initial_state(ElectronState electron, const SpinSystemLayout& layout);

/// Minimum eigenvalue; used for positivity checks.
double min_eigenvalue(const DensityMatrix& rho);

/// Eigendecomposition of H together with a uniform decay rate. ρ(t) = e^{-kt} U ρ₀ U†.
class Propagator {
 public:
  Propagator(const OperatorMatrix& hamiltonian, double decay_rate);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const OperatorMatrix& eigenvectors() const { return eigenvectors_; }
  double decay_rate() const { return decay_rate_; }
  Eigen::Index dimension() const { return eigenvalues_.size(); }

  /// Largest eigenvalue gap λ_max - λ_min, rad/s.
  double spectral_range() const;
  /// ‖V diag(λ) V† - H‖_F / ‖H‖_F recorded at construction.
  double reconstruction_residual() const { return residual_; }

  DensityMatrix evolve(const DensityMatrix& rho0, double t) const;
  OperatorMatrix to_eigenbasis(const OperatorMatrix& op) const;
  OperatorMatrix from_eigenbasis(const OperatorMatrix& op) const;

 private:
  Eigen::VectorXd eigenvalues_;
  OperatorMatrix eigenvectors_;
  double decay_rate_;
  double residual_ = 0.0;
};

Propagator make_propagator(const OperatorMatrix& hamiltonian, double decay_rate);

/// Time series of ⟨S̃ᵢ(t)⟩ = d_cᵢ ⟨S₁ᵢ + S₂ᵢ⟩(t), one entry per grid point.
struct ObservableSeries {
  TimeGrid grid;
  Eigen::Vector3d d_c = Eigen::Vector3d::Zero();
  std::array<std::vector<double>, 3> values;
};

/// Rejects grids that alias the highest Bohr frequency (dt ≥ π/spectral_range).
void check_sampling(const TimeGrid& grid, const Propagator& prop);

ObservableSeries evolve_observables(const DensityMatrix& rho0, const Propagator& prop,
                                    const TimeGrid& grid, const SpinOperators& ops,
                                    const CouplingGeometry& geom);

/// Expectation series Tr[O ρ(t_j)] of arbitrary Hermitian operators.
std::vector<std::vector<double>> expectation_series(const DensityMatrix& rho0, const Propagator& prop,
                                                    const TimeGrid& grid,
                                                    std::span<const OperatorMatrix> observables);

/// Sample means over the grid, evaluated in closed form: for each Bohr frequency ω the sum
/// (1/M) Σⱼ e^{-(k+iω) j dt} is a geometric series. Equals the mean of evolve_observables()
/// output to rounding, at O(d³) cost instead of O(d² M).
struct TimeAverages {
  Eigen::Vector3d total_spin = Eigen::Vector3d::Zero();  // mean ⟨S₁ᵢ + S₂ᵢ⟩
  double singlet_probability = 0.0;                      // mean Tr[ρ P_S]
};

TimeAverages time_averages(const DensityMatrix& rho0, const Propagator& prop, const TimeGrid& grid,
                           const SpinOperators& ops);

/// Same averages for ρ₀ = |ψ_e⟩⟨ψ_e| ⊗ I/M, through the electron reduced density matrix.
/// Cost is one d³ product instead of four; requires the [e₁, e₂, nuclei…] ordering.
TimeAverages time_averages(ElectronState electron, const Propagator& prop, const TimeGrid& grid,
                           const SpinOperators& ops);

/// Tr[ρ (|S₀⟩⟨S₀| ⊗ I)].
double singlet_probability(const DensityMatrix& rho, const SpinOperators& ops);

/// φ_s = k dt Σ_t P_S(t).
double singlet_yield(std::span<const double> singlet_series, double k, double dt);

/// Closed-form singlet yield over `grid` (k·dt·M times the mean singlet probability).
double singlet_yield(const DensityMatrix& rho0, const Propagator& prop, const TimeGrid& grid,
                     const SpinOperators& ops);

}  // namespace rpnv
