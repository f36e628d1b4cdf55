#include "rpnv/oracle.hpp"

#include "rpnv/errors.hpp"

#include <cmath>
#include <sstream>

namespace rpnv {

namespace {

double bohr_range(const OperatorMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

// L(ρ) = -i(Hρ - ρH) - kρ. For Hermitian H and ρ, ρH = (Hρ)†.
DensityMatrix generator(const OperatorMatrix& h, const DensityMatrix& rho, double k) {
  const OperatorMatrix hr = h * rho;
  return std::complex<double>(0.0, -1.0) * (hr - hr.adjoint()) - k * rho;
}

DensityMatrix rk4_step(const OperatorMatrix& h, const DensityMatrix& rho, double k, double dt) {
  const DensityMatrix k1 = generator(h, rho, k);
  const DensityMatrix k2 = generator(h, rho + 0.5 * dt * k1, k);
  const DensityMatrix k3 = generator(h, rho + 0.5 * dt * k2, k);
  const DensityMatrix k4 = generator(h, rho + dt * k3, k);
  DensityMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.adjoint());
}

DensityMatrix integrate(const DensityMatrix& rho0, const OperatorMatrix& h, double k, double dt,
                        std::size_t steps) {
  DensityMatrix rho = rho0;
  for (std::size_t s = 0; s < steps; ++s) rho = rk4_step(h, rho, k, dt);
  return rho;
}

}  // namespace

double oracle_step(const OperatorMatrix& h, double safety) {
  const double range = bohr_range(h);
  return range > 0.0 ? safety / range : 1e-9;
}

OracleResult rk4_evolve(const DensityMatrix& rho0, const OperatorMatrix& h, double k, double dt,
                        double t_total, std::span<const OperatorMatrix> observables,
                        const OracleOptions& options) {
  if (h.rows() > static_cast<Eigen::Index>(options.max_dimension)) {
    throw ConfigError("rk4_evolve: dimension " + std::to_string(h.rows()) + " exceeds oracle limit " +
                      std::to_string(options.max_dimension));
  }
  if (!(dt > 0.0) || !(t_total >= 0.0)) throw ConfigError("rk4_evolve: need dt > 0 and T >= 0");
  const double range = bohr_range(h);
  if (!(dt * range < options.stability_bound)) {
    std::ostringstream msg;
    msg << "rk4_evolve: dt = " << dt << " s violates dt·λ_range < " << options.stability_bound
        << "; use dt <= " << 0.5 * options.stability_bound / range << " s";
    throw ConfigError(msg.str());
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_total / dt));
  const std::size_t every = std::max<std::size_t>(1, options.record_every);

  OracleResult out;
  out.dt = dt;
  out.observables.assign(observables.size(), {});
  DensityMatrix rho = rho0;
  auto record = [&](std::size_t s) {
    out.times.push_back(dt * static_cast<double>(s));
    for (std::size_t o = 0; o < observables.size(); ++o) {
      out.observables[o].push_back((rho.cwiseProduct(observables[o].transpose())).sum().real());
    }
    if (options.keep_snapshots) out.snapshots.push_back(rho);
  };
  {
    const DensityMatrix full = rk4_step(h, rho0, k, dt);
    const DensityMatrix half = rk4_step(h, rk4_step(h, rho0, k, 0.5 * dt), k, 0.5 * dt);
    out.local_error = (full - half).norm() * 16.0 / 15.0;
  }
  record(0);
  for (std::size_t s = 1; s <= steps; ++s) {
    rho = rk4_step(h, rho, k, dt);
    if (s % every == 0 || s == steps) record(s);
  }
  out.final_state = rho;
  return out;
}

double rk4_convergence_order(const DensityMatrix& rho0, const OperatorMatrix& h, double k, double dt,
                             double t_total) {
  const auto steps = static_cast<std::size_t>(std::llround(t_total / dt));
  if (steps < 1) throw ConfigError("rk4_convergence_order: T must cover at least one step");
  const DensityMatrix a = integrate(rho0, h, k, dt, steps);
  const DensityMatrix b = integrate(rho0, h, k, dt / 2.0, 2 * steps);
  const DensityMatrix c = integrate(rho0, h, k, dt / 4.0, 4 * steps);
  return std::log2((a - b).norm() / (b - c).norm());
}

}  // namespace rpnv
