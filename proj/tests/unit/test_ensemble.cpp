#include "rpnv/ensemble.hpp"
#include "rpnv/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rpnv;

namespace {

RadicalPairConfig small_pair() {
  RadicalPairConfig cfg;
  cfg.radical1 = {{SpinSpecies::spin_half("H"), principal_tensor(-0.2, 0.1, 1.2)}};
  cfg.j_exchange_mT = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("realization generator depends only on (seed, index)") {
  auto a = realization_rng(42, 3);
  auto b = realization_rng(42, 3);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  auto c = realization_rng(42, 4);
  auto d = realization_rng(43, 3);
  auto a2 = realization_rng(42, 3);
  const auto first = a2();
  CHECK(c() != first);
  CHECK(d() != first);
  auto u = realization_rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = uniform01(u);
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("Haar rotations: proper, and their mean matrix vanishes") {
  auto rng = realization_rng(9, 0);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  const int n = 20000;
  double zz2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Rotation r = haar_rotation(rng);
    REQUIRE(r.matrix.determinant() == testsupport::approx(1.0).epsilon(1e-12));
    sum += r.matrix;
    zz2 += r.matrix(2, 2) * r.matrix(2, 2);
  }
  CHECK((sum / n).cwiseAbs().maxCoeff() < 0.03);
  // E[R_zz²] = 1/3 for the Haar measure on SO(3).
  CHECK(zz2 / n == testsupport::approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("sampled molecules respect the ensemble settings") {
  EnsembleSpec spec;
  spec.orientation = OrientationMode::RandomEuler;
  spec.seed = 11;
  CHECK(spec.shell_volume_nm3() == testsupport::approx(2.0 * M_PI / 3.0 * (8000.0 - 125.0)));
  const auto mols = sample_realization(spec, 0, 0.3, 0.0);
  CHECK(mols.size() >= 1);
  CHECK(mols.size() <= spec.max_count);
  for (const auto& m : mols) {
    CHECK(m.r_nm >= 5.0);
    CHECK(m.r_nm <= 20.0);
    CHECK(m.alpha >= 0.0);
    CHECK(m.alpha <= M_PI / 2 + 1e-15);
    CHECK(m.d_c[1] == 0.0);
  }
  // Same index, different call order: identical molecules.
  const auto again = sample_realization(spec, 0, 0.3, 0.0);
  REQUIRE(again.size() == mols.size());
  for (std::size_t i = 0; i < mols.size(); ++i) {
    CHECK(again[i].r_nm == mols[i].r_nm);
    CHECK((again[i].rotation.matrix - mols[i].rotation.matrix).norm() == 0.0);
  }
  EnsembleSpec fixed = spec;
  fixed.count_mode = CountMode::Fixed;
  fixed.fixed_count = 7;
  CHECK(sample_realization(fixed, 5).size() == 7);
  EnsembleSpec aligned;
  for (const auto& m : sample_realization(aligned, 2)) CHECK(m.rotation.is_identity());
}

TEST_CASE("invalid ensemble settings are rejected") {
  EnsembleSpec s;
  s.r_min_nm = 0.0;
  CHECK_THROWS_AS(s.validate(), PhysicsError);
  s = EnsembleSpec{};
  s.r_min_nm = 30.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = EnsembleSpec{};
  s.n_realizations = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("aligned ensemble equals the sum of point-dipole contributions") {
  const auto cfg = small_pair();
  EnsembleSpec spec;
  spec.n_realizations = 3;
  spec.count_mode = CountMode::Fixed;
  spec.fixed_count = 5;
  const std::vector<double> b{0.3};
  const auto stats = ensemble_sweep(cfg, b, 0.0, 0.0, spec);
  const SpinOperators ops(cfg.layout());
  const auto p = evaluate_point(ops, cfg, {0.3, 0.0, 0.0}, Rotation::identity());
  for (std::size_t r = 0; r < 3; ++r) {
    double expected = 0.0;
    for (const auto& m : sample_realization(spec, r)) expected += single_molecule_prefactor(m.r_nm) * 2.0 * p.mean_spin[2];
    CHECK(stats.points[0].realizations[r][2] == testsupport::approx(expected).epsilon(1e-12));
    CHECK(stats.points[0].realizations[r][0] == 0.0);
  }
  double mean = 0.0;
  for (const auto& x : stats.points[0].realizations) mean += x[2] / 3.0;
  double var = 0.0;
  for (const auto& x : stats.points[0].realizations) var += (x[2] - mean) * (x[2] - mean) / 2.0;
  CHECK(stats.points[0].mean[2] == testsupport::approx(mean).epsilon(1e-12));
  CHECK(stats.points[0].variance[2] == testsupport::approx(var).epsilon(1e-10));
}

TEST_CASE("ensemble sweeps are reproducible and thread-count independent") {
  const auto cfg = small_pair();
  EnsembleSpec spec;
  spec.orientation = OrientationMode::RandomEuler;
  spec.n_realizations = 4;
  spec.count_mode = CountMode::Fixed;
  spec.fixed_count = 6;
  spec.seed = 99;
  const std::vector<double> b{0.1, 1.0};
  const auto a = ensemble_sweep(cfg, b, 0.0, 0.0, spec, {}, 1);
  const auto c = ensemble_sweep(cfg, b, 0.0, 0.0, spec, {}, 3);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(a.points[i].mean == c.points[i].mean);
    CHECK(a.points[i].variance == c.points[i].variance);
  }
  spec.seed = 100;
  const auto d = ensemble_sweep(cfg, b, 0.0, 0.0, spec);
  CHECK(d.points[0].mean != a.points[0].mean);
}
