#include "rpnv/spincore.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace rpnv;
using testsupport::max_abs;

namespace {

OperatorMatrix comm(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }

SpinSystemLayout mixed_layout() {
  return SpinSystemLayout({SpinSpecies::electron("e1"), SpinSpecies::electron("e2"), SpinSpecies::spin_one("N"),
                           SpinSpecies::spin_half("H")},
                          1);
}

}  // namespace

TEST_CASE("su(2) commutators and Casimir for s = 1/2 and s = 1") {
  for (int two_s : {1, 2}) {
    const SpinSpecies sp{"x", two_s};
    const auto s = spin_matrices(sp);
    const std::complex<double> i(0, 1);
    CHECK(max_abs(comm(s.x, s.y) - i * s.z) < 1e-14);
    CHECK(max_abs(comm(s.y, s.z) - i * s.x) < 1e-14);
    CHECK(max_abs(comm(s.z, s.x) - i * s.y) < 1e-14);
    const double ss = sp.spin() * (sp.spin() + 1.0);
    const OperatorMatrix casimir = s.x * s.x + s.y * s.y + s.z * s.z;
    CHECK(max_abs(casimir - ss * testsupport::eye(sp.dimension())) < 1e-14);
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(s.z);
    for (int m = 0; m < sp.dimension(); ++m) {
      CHECK(es.eigenvalues()[m] == doctest::Approx(-sp.spin() + m).epsilon(1e-14));
    }
  }
}

TEST_CASE("spin matrices match the explicit reference tables") {
  for (int two_s : {1, 2}) {
    const auto s = spin_matrices({"x", two_s});
    for (int a = 0; a < 3; ++a) CHECK(max_abs(s[a] - testsupport::spin(a, two_s)) < 1e-15);
  }
}

TEST_CASE("layout dimensions and site bookkeeping") {
  const auto lay = mixed_layout();
  CHECK(lay.total_dimension() == 24);
  CHECK(lay.nuclear_dimension() == 6);
  CHECK(lay.nuclei_count() == 2);
  CHECK(lay.radical1_site(0) == 2);
  CHECK(lay.radical2_site(0) == 3);
  CHECK(lay.dimension_before(2) == 4);
  CHECK(lay.dimension_after(2) == 2);
  CHECK(SpinSystemLayout::electrons_only().total_dimension() == 4);
}

TEST_CASE("embed agrees with an explicit Kronecker chain") {
  const auto lay = mixed_layout();
  const auto sn = spin_matrices(SpinSpecies::spin_one("N"));
  const auto ref = testsupport::kron_all({testsupport::eye(2), testsupport::eye(2), sn.y, testsupport::eye(2)});
  CHECK(max_abs(embed(sn.y, 2, lay) - ref) < 1e-15);
}

TEST_CASE("embed_pair equals the product of two embeds, and distinct sites commute") {
  const auto lay = mixed_layout();
  const auto se = spin_matrices(SpinSpecies::electron("e"));
  const auto sh = spin_matrices(SpinSpecies::spin_half("H"));
  for (int a = 0; a < 3; ++a) {
    const OperatorMatrix e0 = embed(se[a], 0, lay);
    const OperatorMatrix h3 = embed(sh[(a + 1) % 3], 3, lay);
    CHECK(max_abs(embed_pair(se[a], 0, sh[(a + 1) % 3], 3, lay) - e0 * h3) < 1e-15);
    CHECK(max_abs(comm(e0, h3)) < 1e-15);
  }
}

TEST_CASE("rotations are proper and act as a group") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation a = euler_rotation(u(rng), u(rng), u(rng));
    const Rotation b = euler_rotation(u(rng), u(rng), u(rng));
    CHECK((a.matrix * a.matrix.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
    CHECK(a.matrix.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    const Rotation ab = a.compose(b);
    CHECK((ab.matrix - a.matrix * b.matrix).norm() < 1e-14);
    const Rotation back = Rotation::from_matrix(ab.matrix);
    CHECK((back.matrix - ab.matrix).norm() < 1e-12);
    CHECK((euler_rotation(back.euler_angles[0], back.euler_angles[1], back.euler_angles[2]).matrix - ab.matrix).norm() <
          1e-12);
  }
  CHECK((euler_rotation(0.3, 0.0, 0.0).matrix - rotation_x(0.3)).norm() < 1e-15);
  CHECK((euler_rotation(0.0, 0.0, 0.4).matrix - rotation_z(0.4)).norm() < 1e-15);
  CHECK(Rotation::identity().is_identity());
}

TEST_CASE("tensor rotation preserves invariants") {
  const CouplingTensor t = principal_tensor(-0.39, 0.0, 1.76);
  const Rotation r = euler_rotation(0.4, -1.1, 2.3);
  const CouplingTensor tr = rotate_tensor(r, t);
  CHECK(tr.trace() == doctest::Approx(t.trace()).epsilon(1e-14));
  CHECK(tr.norm() == doctest::Approx(t.norm()).epsilon(1e-14));
  CHECK((tr - tr.transpose()).norm() < 1e-14);
  CHECK((rotate_tensor(Rotation::from_matrix(r.matrix.transpose()), tr) - t).norm() < 1e-14);
  Eigen::Matrix3d asym;
  asym << 1, 2, 3, 0, 1, 4, 1, 0, 1;
  CHECK((symmetrized(asym) - symmetrized(asym).transpose()).norm() == 0.0);
}
