#pragma once

#include "rpnv/dynamics.hpp"
#include "rpnv/spincore.hpp"

#include <span>
#include <vector>

namespace rpnv {

/// Fixed-step classical RK4 integration of dρ/dt = -i[H, ρ] - kρ. Reference only; limited
/// to small systems.
struct OracleResult {
  std::vector<double> times;
  std::vector<DensityMatrix> snapshots;      // empty unless requested
  std::vector<std::vector<double>> observables;  // [observable][time]
  DensityMatrix final_state;
  double dt = 0.0;
  double local_error = 0.0;  // step-doubling estimate at t = 0
};

struct OracleOptions {
  std::size_t record_every = 1;
  bool keep_snapshots = false;
  std::size_t max_dimension = 64;
  double stability_bound = 0.1;  // required dt·λ_range
};

/// dt that satisfies the stability bound with the given safety factor (dt·λ_range = safety).
double oracle_step(const OperatorMatrix& h, double safety = 0.05);

OracleResult rk4_evolve(const DensityMatrix& rho0, const OperatorMatrix& h, double k, double dt,
                        double t_total, std::span<const OperatorMatrix> observables = {},
                        const OracleOptions& options = {});

/// Observed order p = log2(|y(dt) - y(dt/2)| / |y(dt/2) - y(dt/4)|) on ρ(T) in Frobenius norm.
double rk4_convergence_order(const DensityMatrix& rho0, const OperatorMatrix& h, double k, double dt,
                             double t_total);

}  // namespace rpnv
