#include "rpnv/dynamics.hpp"

#include "rpnv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

namespace rpnv {

namespace {

using cd = std::complex<double>;

// exp(x) - 1 without cancellation for small |x|.
cd expm1c(cd x) {
  if (std::abs(x) < 1e-4) return x * (1.0 + x / 2.0 * (1.0 + x / 3.0 * (1.0 + x / 4.0)));
  return std::exp(x) - 1.0;
}

// (1/M) Σ_{j<M} e^{-x j}
cd geometric_mean(cd x, std::size_t m) {
  if (x == cd(0.0)) return 1.0;
  const double md = static_cast<double>(m);
  return expm1c(-md * x) / (md * expm1c(-x));
}

}  // namespace

double effective_decay_rate(double k, DecayConvention convention) {
  return convention == DecayConvention::RateK ? k : 2.0 * k;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(samples);
  for (std::size_t j = 0; j < samples; ++j) t[j] = at(j);
  return t;
}

TimeGrid TimeGrid::uniform(double t_max, std::size_t samples) {
  if (!(t_max > 0.0) || samples < 2) throw ConfigError("time grid needs t_max > 0 and >= 2 samples");
  return {t_max / static_cast<double>(samples), samples};
}

TimeGrid default_time_grid(double decay_rate, double spectral_range, std::size_t min_samples) {
  const double t_max = decay_rate > 0.0 ? 5.0 / decay_rate : 25e-6;
  std::size_t samples = std::max<std::size_t>(min_samples, 2);
  if (spectral_range > 0.0) {
    const double needed = 1.25 * t_max * spectral_range / constants::kPi;
    if (needed > static_cast<double>(samples)) samples = static_cast<std::size_t>(std::ceil(needed));
  }
  samples += samples % 2;
  return TimeGrid::uniform(t_max, samples);
}

namespace {

Eigen::Vector4cd electron_state_vector(ElectronState electron) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();  // {↑↑, ↑↓, ↓↑, ↓↓}
  const double s = 1.0 / std::sqrt(2.0);
  psi(1) = s;
  psi(2) = electron == ElectronState::Singlet ? -s : s;
  return psi;
}

}  // namespace

DensityMatrix initial_state(ElectronState electron, const SpinSystemLayout& layout) {
  const Eigen::Vector4cd psi = electron_state_vector(electron);
  const Eigen::Matrix4cd e = psi * psi.adjoint();
  const auto nuc = static_cast<Eigen::Index>(layout.nuclear_dimension());
  const auto n = static_cast<Eigen::Index>(layout.total_dimension());
  DensityMatrix rho = DensityMatrix::Zero(n, n);
  const double w = 1.0 / static_cast<double>(nuc);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      if (e(r, c) == cd(0.0)) continue;
      for (Eigen::Index a = 0; a < nuc; ++a) rho(r * nuc + a, c * nuc + a) = e(r, c) * w;
    }
  }
  return rho;
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Propagator::Propagator(const OperatorMatrix& hamiltonian, double decay_rate)
    : decay_rate_(decay_rate) {
  if (hamiltonian.rows() != hamiltonian.cols()) throw ConfigError("Propagator: H must be square");
  if (!(decay_rate >= 0.0)) throw PhysicsError("Propagator: decay rate must be >= 0");
  const double norm = hamiltonian.norm();
  const double herm = (hamiltonian - hamiltonian.adjoint()).norm();
  if (herm > 1e-10 * std::max(norm, 1e-300)) {
    std::ostringstream msg;
    msg << "Propagator: Hamiltonian is not Hermitian (‖H - H†‖/‖H‖ = " << herm / norm << ")";
    throw ConfigError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian);
  if (es.info() != Eigen::Success) throw NumericalError("Propagator: eigensolver failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (norm > 0.0) {
    // ‖HV - VΛ‖ equals ‖VΛV† - H‖ for unitary V and costs one product.
    const OperatorMatrix hv = hamiltonian * eigenvectors_;
    residual_ = (hv - eigenvectors_ * eigenvalues_.cast<cd>().asDiagonal()).norm() / norm;
    if (residual_ > 1e-8) {
      std::ostringstream msg;
      msg << "Propagator: reconstruction residual " << residual_ << " exceeds 1e-8";
      throw NumericalError(msg.str());
    }
  }
}

double Propagator::spectral_range() const {
  if (eigenvalues_.size() == 0) return 0.0;
  return eigenvalues_.maxCoeff() - eigenvalues_.minCoeff();
}

DensityMatrix Propagator::evolve(const DensityMatrix& rho0, double t) const {
  const Eigen::VectorXcd phase =
      (eigenvalues_.cast<cd>() * cd(0.0, -t)).array().exp().matrix();
  OperatorMatrix rt = to_eigenbasis(rho0);
  rt = phase.asDiagonal() * rt * phase.conjugate().asDiagonal();
  return std::exp(-decay_rate_ * t) * from_eigenbasis(rt);
}

OperatorMatrix Propagator::to_eigenbasis(const OperatorMatrix& op) const {
  return eigenvectors_.adjoint() * op * eigenvectors_;
}

OperatorMatrix Propagator::from_eigenbasis(const OperatorMatrix& op) const {
  return eigenvectors_ * op * eigenvectors_.adjoint();
}

Propagator make_propagator(const OperatorMatrix& hamiltonian, double decay_rate) {
  return Propagator(hamiltonian, decay_rate);
}

void check_sampling(const TimeGrid& grid, const Propagator& prop) {
  const double range = prop.spectral_range();
  if (range > 0.0 && !(grid.dt < constants::kPi / range)) {
    std::ostringstream msg;
    msg << "time grid undersamples the dynamics: dt = " << grid.dt
        << " s but the largest Bohr frequency requires dt < " << constants::kPi / range << " s";
    throw ConfigError(msg.str());
  }
}

std::vector<std::vector<double>> expectation_series(const DensityMatrix& rho0, const Propagator& prop,
                                                    const TimeGrid& grid,
                                                    std::span<const OperatorMatrix> observables) {
  check_sampling(grid, prop);
  const Eigen::Index d = prop.dimension();
  const std::size_t nobs = observables.size();
  const OperatorMatrix rt = prop.to_eigenbasis(rho0);
  std::vector<OperatorMatrix> ot;
  ot.reserve(nobs);
  for (const auto& o : observables) ot.push_back(prop.to_eigenbasis(o));

  const auto& lam = prop.eigenvalues();
  // ⟨O⟩(t) = e^{-kt} [Σ_m c_mm + 2 Re Σ_{m<n} c_mn e^{-i(λm-λn)t}],  c_mn = ρ̃_mn Õ_nm
  std::vector<double> diag(nobs, 0.0);
  for (std::size_t o = 0; o < nobs; ++o) {
    for (Eigen::Index m = 0; m < d; ++m) diag[o] += std::real(rt(m, m) * ot[o](m, m));
  }
  double cmax = 0.0;
  for (std::size_t o = 0; o < nobs; ++o) {
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index n = m + 1; n < d; ++n) cmax = std::max(cmax, std::abs(rt(m, n) * ot[o](n, m)));
    }
  }
  const double cut = 1e-15 * cmax;
  std::vector<double> omega;
  std::vector<cd> coeff;  // nobs entries per kept pair
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = m + 1; n < d; ++n) {
      bool keep = false;
      for (std::size_t o = 0; o < nobs && !keep; ++o) keep = std::abs(rt(m, n) * ot[o](n, m)) > cut;
      if (!keep || cmax == 0.0) continue;
      omega.push_back(lam(m) - lam(n));
      for (std::size_t o = 0; o < nobs; ++o) coeff.push_back(2.0 * rt(m, n) * ot[o](n, m));
    }
  }
  const std::size_t pairs = omega.size();
  std::vector<cd> phase(pairs, cd(1.0)), step(pairs);
  for (std::size_t p = 0; p < pairs; ++p) step[p] = std::exp(cd(0.0, -omega[p] * grid.dt));

  std::vector<std::vector<double>> out(nobs, std::vector<double>(grid.samples, 0.0));
  std::vector<double> acc(nobs);
  for (std::size_t j = 0; j < grid.samples; ++j) {
    if (j % 512 == 0 && j > 0) {
      // Re-anchor recurrences to bound accumulated phase error.
      const double t = grid.at(j);
      for (std::size_t p = 0; p < pairs; ++p) phase[p] = std::exp(cd(0.0, -omega[p] * t));
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t p = 0; p < pairs; ++p) {
      const cd ph = phase[p];
      const cd* c = &coeff[p * nobs];
      for (std::size_t o = 0; o < nobs; ++o) acc[o] += c[o].real() * ph.real() - c[o].imag() * ph.imag();
      phase[p] = ph * step[p];
    }
    const double decay = std::exp(-prop.decay_rate() * grid.at(j));
    for (std::size_t o = 0; o < nobs; ++o) out[o][j] = decay * (diag[o] + acc[o]);
  }
  return out;
}

ObservableSeries evolve_observables(const DensityMatrix& rho0, const Propagator& prop,
                                    const TimeGrid& grid, const SpinOperators& ops,
                                    const CouplingGeometry& geom) {
  check_sampling(grid, prop);
  ObservableSeries series;
  series.grid = grid;
  series.d_c = geom.d_c;
  std::vector<OperatorMatrix> needed;
  std::vector<int> which;
  for (int i = 0; i < 3; ++i) {
    series.values[static_cast<std::size_t>(i)].assign(grid.samples, 0.0);
    if (geom.d_c[i] != 0.0) {
      needed.push_back(ops.total(i));
      which.push_back(i);
    }
  }
  if (needed.empty()) return series;
  const auto raw = expectation_series(rho0, prop, grid, needed);
  for (std::size_t k = 0; k < which.size(); ++k) {
    const int i = which[k];
    auto& dst = series.values[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < grid.samples; ++j) dst[j] = geom.d_c[i] * raw[k][j];
  }
  return series;
}

namespace {

// W_mn = (1/M) Σⱼ e^{-(k + i(λ_m - λ_n)) j dt}. The powers come from per-eigenvalue phases;
// pairs with small |x| go through expm1 to avoid cancellation in 1 - e^{-x}.
OperatorMatrix geometric_weights(const Propagator& prop, const TimeGrid& grid) {
  const Eigen::Index d = prop.dimension();
  const auto& lam = prop.eigenvalues();
  const double md = static_cast<double>(grid.samples);
  const double kdt = prop.decay_rate() * grid.dt;
  const double step_decay = std::exp(-kdt);
  const double span_decay = std::exp(-kdt * md);
  Eigen::VectorXcd p(d), q(d);
  for (Eigen::Index m = 0; m < d; ++m) {
    p(m) = std::exp(cd(0.0, -lam(m) * grid.dt));
    q(m) = std::exp(cd(0.0, -lam(m) * grid.dt * md));
  }
  OperatorMatrix w(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      const cd x(kdt, (lam(m) - lam(n)) * grid.dt);
      if (std::abs(x) < 1e-2) {
        w(m, n) = geometric_mean(x, grid.samples);
      } else {
        const cd one_step = step_decay * p(m) * std::conj(p(n));
        const cd full_span = span_decay * q(m) * std::conj(q(n));
        w(m, n) = (1.0 - full_span) / (md * (1.0 - one_step));
      }
    }
  }
  return w;
}

TimeAverages averages_from(const Eigen::MatrixXcd& rho_e_bar, const SpinOperators& electrons) {
  TimeAverages out;
  for (int i = 0; i < 3; ++i) out.total_spin[i] = (electrons.total(i) * rho_e_bar).trace().real();
  out.singlet_probability = (electrons.singlet_projector() * rho_e_bar).trace().real();
  return out;
}

}  // namespace

TimeAverages time_averages(const DensityMatrix& rho0, const Propagator& prop, const TimeGrid& grid,
                           const SpinOperators& ops) {
  OperatorMatrix w = prop.to_eigenbasis(rho0);
  w = w.cwiseProduct(geometric_weights(prop, grid));
  w = prop.from_eigenbasis(w);  // time-averaged density matrix
  TimeAverages out;
  for (int i = 0; i < 3; ++i) {
    // Tr[W O] = Σ_ab W_ab O_ba
    out.total_spin[i] = (w.cwiseProduct(ops.total(i).transpose())).sum().real();
  }
  out.singlet_probability = (w.cwiseProduct(ops.singlet_projector().transpose())).sum().real();
  return out;
}

TimeAverages time_averages(ElectronState electron, const Propagator& prop, const TimeGrid& grid,
                           const SpinOperators& ops) {
  const Eigen::Index d = prop.dimension();
  const auto nuc = static_cast<Eigen::Index>(ops.layout().nuclear_dimension());
  if (d != 4 * nuc) throw ConfigError("time_averages: propagator and layout dimensions differ");
  const OperatorMatrix& v = prop.eigenvectors();
  // ρ₀ = Q Q† with columns |ψ_e⟩ ⊗ |a⟩ / √nuc, so V†ρ₀V = A A† with A = V†Q.
  const Eigen::Vector4cd psi = electron_state_vector(electron);
  const double norm = 1.0 / std::sqrt(static_cast<double>(nuc));
  Eigen::MatrixXcd qv = Eigen::MatrixXcd::Zero(nuc, d);  // Q†V
  for (Eigen::Index e = 0; e < 4; ++e) {
    if (psi(e) == cd(0.0)) continue;
    qv.noalias() += (std::conj(psi(e)) * norm) * v.middleRows(e * nuc, nuc);
  }
  OperatorMatrix r(d, d);
  r.noalias() = qv.adjoint() * qv;
  r = r.cwiseProduct(geometric_weights(prop, grid));
  OperatorMatrix y(d, d);
  y.noalias() = v * r;
  // Electron block (b, a) of Tr_nuc[V R V†] = Σ_{i,n} Y_{(b,i),n} conj(V_{(a,i),n}).
  Eigen::Matrix4cd rho_e = Eigen::Matrix4cd::Zero();
  for (Eigen::Index b = 0; b < 4; ++b) {
    for (Eigen::Index a = 0; a < 4; ++a) {
      rho_e(b, a) = (y.middleRows(b * nuc, nuc).cwiseProduct(v.middleRows(a * nuc, nuc).conjugate())).sum();
    }
  }
  static const SpinOperators electrons(SpinSystemLayout::electrons_only());
  return averages_from(rho_e, electrons);
}

double singlet_probability(const DensityMatrix& rho, const SpinOperators& ops) {
  return (rho.cwiseProduct(ops.singlet_projector().transpose())).sum().real();
}

double singlet_yield(std::span<const double> singlet_series, double k, double dt) {
  double sum = 0.0;
  for (double p : singlet_series) sum += p;
  return k * dt * sum;
}

double singlet_yield(const DensityMatrix& rho0, const Propagator& prop, const TimeGrid& grid,
                     const SpinOperators& ops) {
  const double mean = time_averages(rho0, prop, grid, ops).singlet_probability;
  return prop.decay_rate() * grid.dt * static_cast<double>(grid.samples) * mean;
}

}  // namespace rpnv
