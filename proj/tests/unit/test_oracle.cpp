#include "rpnv/errors.hpp"
#include "rpnv/oracle.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rpnv;

namespace {

RadicalPairConfig small_pair() {
  RadicalPairConfig cfg;
  cfg.radical1 = {{SpinSpecies::spin_half("H"), principal_tensor(-0.2, 0.1, 1.2)}};
  cfg.radical2 = {{SpinSpecies::spin_half("H2"), principal_tensor(0.3, 0.3, -0.6)}};
  cfg.j_exchange_mT = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("RK4 reference tracks the eigen propagator") {
  const auto cfg = small_pair();
  const SpinOperators ops(cfg.layout());
  const OperatorMatrix h = build_rp_hamiltonian(ops, cfg, {0.2, 0.5, 0.0}, Rotation::identity());
  const Propagator prop(h, 2e5);
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  const double dt = oracle_step(h, 0.01);
  const std::vector<OperatorMatrix> obs{ops.total(2), ops.singlet_projector()};
  OracleOptions oo;
  oo.record_every = 50;
  const auto rk = rk4_evolve(rho0, h, 2e5, dt, 2000 * dt, obs, oo);
  REQUIRE(rk.times.size() == 41);
  for (std::size_t j = 0; j < rk.times.size(); ++j) {
    const DensityMatrix exact = prop.evolve(rho0, rk.times[j]);
    CHECK(std::abs(rk.observables[0][j] - (ops.total(2) * exact).trace().real()) < 1e-8);
    CHECK(std::abs(rk.observables[1][j] - singlet_probability(exact, ops)) < 1e-8);
  }
  CHECK(testsupport::max_abs(rk.final_state - prop.evolve(rho0, rk.times.back())) < 1e-8);
  CHECK(rk.local_error > 0.0);
  CHECK(rk.local_error < 1e-10);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto cfg = small_pair();
  const SpinOperators ops(cfg.layout());
  const OperatorMatrix h = build_rp_hamiltonian(ops, cfg, {0.5, 0.3, 0.0}, Rotation::identity());
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  const double dt = oracle_step(h, 0.08);
  const double p = rk4_convergence_order(rho0, h, 2e5, dt, 400 * dt);
  CHECK(p > 3.7);
  CHECK(p < 4.3);
}

TEST_CASE("RK4 guards: dimension limit and stability bound") {
  const auto cfg = small_pair();
  const SpinOperators ops(cfg.layout());
  const OperatorMatrix h = build_rp_hamiltonian(ops, cfg, {0.5, 0.3, 0.0}, Rotation::identity());
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  CHECK_THROWS_AS(rk4_evolve(rho0, h, 0.0, oracle_step(h, 0.2), 1e-8), ConfigError);
  OracleOptions tiny;
  tiny.max_dimension = 8;
  CHECK_THROWS_AS(rk4_evolve(rho0, h, 0.0, oracle_step(h, 0.01), 1e-8, {}, tiny), ConfigError);
}

TEST_CASE("RK4 preserves Hermiticity and the trace law") {
  const auto cfg = small_pair();
  const SpinOperators ops(cfg.layout());
  const OperatorMatrix h = build_rp_hamiltonian(ops, cfg, {1.0, 0.0, 0.0}, Rotation::identity());
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  const double dt = oracle_step(h, 0.02);
  OracleOptions oo;
  oo.keep_snapshots = true;
  oo.record_every = 100;
  const auto rk = rk4_evolve(rho0, h, 2e5, dt, 1000 * dt, {}, oo);
  for (std::size_t j = 0; j < rk.snapshots.size(); ++j) {
    const auto& r = rk.snapshots[j];
    CHECK(testsupport::max_abs(r - r.adjoint()) == 0.0);
    CHECK(std::abs(r.trace().real() - std::exp(-2e5 * rk.times[j])) < 1e-10);
  }
}
