#include "rpnv/dynamics.hpp"
#include "rpnv/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>

using namespace rpnv;
using testsupport::max_abs;

namespace {

RadicalPairConfig one_nucleus_pair(double j_mT = 0.25) {
  RadicalPairConfig cfg;
  cfg.radical1 = {{SpinSpecies::spin_one("N5a"), principal_tensor(-0.39, -0.39, 1.76)}};
  cfg.radical2 = {{SpinSpecies::spin_one("N5b"), principal_tensor(-0.39, -0.39, 1.76)}};
  cfg.j_exchange_mT = j_mT;
  cfg.recombination_rate = 2e5;
  return cfg;
}

}  // namespace

TEST_CASE("initial singlet state: unit trace, pure electron singlet, maximally mixed nuclei") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  const DensityMatrix rho = initial_state(ElectronState::Singlet, ops.layout());
  CHECK(rho.trace().real() == testsupport::approx(1.0).epsilon(1e-15));
  CHECK(singlet_probability(rho, ops) == testsupport::approx(1.0).epsilon(1e-14));
  CHECK(max_abs(rho * rho - rho / 9.0) < 1e-15);
  const DensityMatrix t0 = initial_state(ElectronState::TripletZero, ops.layout());
  CHECK(std::abs(singlet_probability(t0, ops)) < 1e-15);
  CHECK(std::abs((ops.s1_dot_s2() * rho).trace().real() + 0.75) < 1e-14);
}

TEST_CASE("eigen propagator matches a matrix-exponential oracle") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  const OperatorMatrix h = build_rp_hamiltonian(ops, cfg, {0.05, 0.8, 0.3}, Rotation::identity());
  const Propagator prop(h, 2e5);
  CHECK(prop.reconstruction_residual() < 1e-12);
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  for (double t : {0.0, 1.3e-7, 2.2e-6}) {
    const std::complex<double> mi(0.0, -1.0);
    const Eigen::MatrixXcd u = (mi * t * h).exp();
    const DensityMatrix ref = std::exp(-2e5 * t) * u * rho0 * u.adjoint();
    CHECK(max_abs(prop.evolve(rho0, t) - ref) < 1e-10);
  }
}

TEST_CASE("trace law, Hermiticity, positivity and composition") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  const Propagator prop(build_rp_hamiltonian(ops, cfg, {1.0, 0.3, 0.0}, Rotation::identity()), 2e5);
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  for (double t : {0.0, 1e-6, 5e-6, 25e-6}) {
    const DensityMatrix r = prop.evolve(rho0, t);
    CHECK(std::abs(r.trace().real() - std::exp(-2e5 * t)) < 1e-12);
    CHECK(max_abs(r - r.adjoint()) < 1e-15);
    CHECK(min_eigenvalue(r) > -1e-12);
  }
  const DensityMatrix two_step = prop.evolve(prop.evolve(rho0, 1.7e-6), 2.9e-6);
  CHECK(max_abs(two_step - prop.evolve(rho0, 4.6e-6)) < 1e-13);
}

TEST_CASE("decay conventions") {
  CHECK(effective_decay_rate(2e5, DecayConvention::RateK) == 2e5);
  CHECK(effective_decay_rate(2e5, DecayConvention::Rate2K) == 4e5);
  const Propagator p(OperatorMatrix::Identity(4, 4), effective_decay_rate(1e5, DecayConvention::Rate2K));
  const DensityMatrix rho = initial_state(ElectronState::Singlet, SpinSystemLayout::electrons_only());
  CHECK(p.evolve(rho, 1e-5).trace().real() == testsupport::approx(std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("invalid Hamiltonians are rejected") {
  OperatorMatrix h = OperatorMatrix::Zero(4, 4);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(Propagator(h, 1.0), ConfigError);
}

TEST_CASE("default time grid: 5/k span, even length, Nyquist headroom") {
  const TimeGrid g = default_time_grid(2e5, 1e9);
  CHECK(g.samples % 2 == 0);
  CHECK(g.samples >= 4096);
  CHECK(g.duration() == testsupport::approx(25e-6));
  CHECK(g.dt * 1e9 < M_PI / 1.25 * 1.0001);
  const TimeGrid slow = default_time_grid(2e5, 1.0);
  CHECK(slow.samples == 4096);
  CHECK(default_time_grid(0.0, 1.0).duration() == testsupport::approx(25e-6));
}

TEST_CASE("Nyquist guard rejects aliasing grids") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  const Propagator prop(build_rp_hamiltonian(ops, cfg, {5.0, 0.0, 0.0}, Rotation::identity()), 2e5);
  const double dt_limit = M_PI / prop.spectral_range();
  CHECK_THROWS_AS(check_sampling({dt_limit * 1.01, 100}, prop), ConfigError);
  CHECK_NOTHROW(check_sampling({dt_limit * 0.9, 100}, prop));
}

TEST_CASE("closed-form time averages equal the mean of the sampled series") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  for (double theta : {0.0, 0.6, 1.5707963267948966}) {
    const Propagator prop(build_rp_hamiltonian(ops, cfg, {0.05, theta, 0.0}, Rotation::identity()), 2e5);
    const TimeGrid grid = default_time_grid(2e5, prop.spectral_range());
    const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
    const std::vector<OperatorMatrix> obs{ops.total(0), ops.total(1), ops.total(2), ops.singlet_projector()};
    const auto series = expectation_series(rho0, prop, grid, obs);
    const TimeAverages av = time_averages(rho0, prop, grid, ops);
    for (int i = 0; i < 3; ++i) {
      const double mean = std::accumulate(series[i].begin(), series[i].end(), 0.0) / series[i].size();
      CHECK(std::abs(mean - av.total_spin[i]) < 1e-13);
    }
    const double ps = std::accumulate(series[3].begin(), series[3].end(), 0.0) / series[3].size();
    CHECK(std::abs(ps - av.singlet_probability) < 1e-13);
    CHECK(singlet_yield(series[3], 2e5, grid.dt) == testsupport::approx(singlet_yield(rho0, prop, grid, ops)).epsilon(1e-12));
  }
}

TEST_CASE("expectation series agree with direct evolution at sample points") {
  const auto cfg = one_nucleus_pair(0.0);
  const SpinOperators ops(cfg.layout());
  const Propagator prop(build_rp_hamiltonian(ops, cfg, {0.5, 1.0, 0.5}, Rotation::identity()), 2e5);
  const TimeGrid grid = default_time_grid(2e5, prop.spectral_range());
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  const std::vector<OperatorMatrix> obs{ops.total(0), ops.singlet_projector()};
  const auto s = expectation_series(rho0, prop, grid, obs);
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{777}, grid.samples - 1}) {
    const DensityMatrix r = prop.evolve(rho0, grid.at(j));
    CHECK(std::abs(s[0][j] - (obs[0] * r).trace().real()) < 1e-12);
    CHECK(std::abs(s[1][j] - singlet_probability(r, ops)) < 1e-12);
  }
}

TEST_CASE("evolve_observables scales by d_c and keeps vanishing components exactly zero") {
  const auto cfg = one_nucleus_pair();
  const SpinOperators ops(cfg.layout());
  const auto geom = coupling_geometry(10.0, 0.0, 0.0);
  const FieldConfig field{0.05, 0.0, 0.0};
  const Propagator prop(build_rp_hamiltonian(ops, cfg, field, Rotation::identity()), 2e5);
  const TimeGrid grid = default_time_grid(2e5, prop.spectral_range());
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  const auto series = evolve_observables(rho0, prop, grid, ops, geom);
  for (double v : series.values[0]) REQUIRE(v == 0.0);
  for (double v : series.values[1]) REQUIRE(v == 0.0);
  const std::vector<OperatorMatrix> obs{ops.total(2)};
  const auto raw = expectation_series(rho0, prop, grid, obs)[0];
  for (std::size_t j = 0; j < grid.samples; j += 97) CHECK(std::abs(series.values[2][j] - 2.0 * raw[j]) < 1e-13);
}

TEST_CASE("zero field without hyperfine leaves the singlet stationary") {
  RadicalPairConfig cfg;
  cfg.recombination_rate = 1e5;
  const SpinOperators ops(cfg.layout());
  const Propagator prop(build_rp_hamiltonian(ops, cfg, {0.0, 0.0, 0.0}, Rotation::identity()), 1e5);
  const TimeGrid grid = TimeGrid::uniform(50e-6, 4096);
  const DensityMatrix rho0 = initial_state(ElectronState::Singlet, ops.layout());
  // φ_s = k dt Σ e^{-k t_j}, a pure geometric sum.
  const double x = 1e5 * grid.dt;
  const double expected = x * (1.0 - std::exp(-x * 4096.0)) / (1.0 - std::exp(-x));
  CHECK(singlet_yield(rho0, prop, grid, ops) == testsupport::approx(expected).epsilon(1e-12));
}

TEST_CASE("reduced-state averages agree with the full density-matrix route") {
  RadicalPairConfig cfg;
  cfg.radical1 = {{SpinSpecies::spin_one("N5"), principal_tensor(-0.39, -0.39, 1.76)},
                  {SpinSpecies::spin_half("H"), principal_tensor(-0.2, 0.1, 0.9)}};
  cfg.radical2 = {{SpinSpecies::spin_one("N1"), principal_tensor(-0.1, -0.1, 0.8)}};
  cfg.j_exchange_mT = 0.2;
  const SpinOperators ops(cfg.layout());
  for (const auto state : {ElectronState::Singlet, ElectronState::TripletZero}) {
    for (double b : {0.0, 0.05, 1.3}) {
      const Propagator prop(build_rp_hamiltonian(ops, cfg, {b, 0.7, 0.4}, euler_rotation(0.2, 0.9, 1.4)), 2e5);
      const TimeGrid grid = default_time_grid(2e5, prop.spectral_range());
      const auto full = time_averages(initial_state(state, ops.layout()), prop, grid, ops);
      const auto reduced = time_averages(state, prop, grid, ops);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(full.total_spin[i] - reduced.total_spin[i]) < 1e-13);
      CHECK(std::abs(full.singlet_probability - reduced.singlet_probability) < 1e-13);
    }
  }
}
