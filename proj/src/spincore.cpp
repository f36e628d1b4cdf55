#include "rpnv/spincore.hpp"

#include "rpnv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace rpnv {

namespace {
using cd = std::complex<double>;
}

SpinSystemLayout::SpinSystemLayout(std::vector<SpinSpecies> species, std::size_t nuclei_on_radical1)
    : species_(std::move(species)), nuclei_on_radical1_(nuclei_on_radical1), total_dimension_(1) {
  if (species_.size() < 2) {
    throw ConfigError("spin layout needs two electrons, got " + std::to_string(species_.size()) +
                      " species");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    if (species_[i].two_s != 1) {
      throw ConfigError("layout site " + std::to_string(i) + " must be a spin-1/2 electron");
    }
  }
  if (nuclei_on_radical1_ > species_.size() - 2) {
    throw ConfigError("radical-1 nucleus count exceeds number of nuclei in layout");
  }
  for (const auto& s : species_) {
    if (s.two_s != 1 && s.two_s != 2) {
      throw ConfigError("unsupported spin " + std::to_string(s.two_s) + "/2 for '" + s.label +
                        "' (only 1/2 and 1 are supported)");
    }
    total_dimension_ *= static_cast<std::size_t>(s.dimension());
  }
}

std::size_t SpinSystemLayout::dimension_before(std::size_t site) const {
  std::size_t d = 1;
  for (std::size_t i = 0; i < site; ++i) d *= static_cast<std::size_t>(species_[i].dimension());
  return d;
}

std::size_t SpinSystemLayout::dimension_after(std::size_t site) const {
  std::size_t d = 1;
  for (std::size_t i = site + 1; i < species_.size(); ++i) {
    d *= static_cast<std::size_t>(species_[i].dimension());
  }
  return d;
}

SpinSystemLayout SpinSystemLayout::electrons_only() {
  return SpinSystemLayout({SpinSpecies::electron("e1"), SpinSpecies::electron("e2")}, 0);
}

SpinMatrices spin_matrices(const SpinSpecies& species) {
  if (species.two_s != 1 && species.two_s != 2) {
    throw ConfigError("spin_matrices: unsupported spin " + std::to_string(species.two_s) +
                      "/2 (supported: 1/2, 1)");
  }
  const int dim = species.dimension();
  const double s = species.spin();
  OperatorMatrix sp = OperatorMatrix::Zero(dim, dim);  // raising operator
  OperatorMatrix sz = OperatorMatrix::Zero(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const double m = s - row;
    sz(row, row) = m;
    if (row > 0) {
      // <m+1|S+|m> = sqrt(s(s+1) - m(m+1))
      sp(row - 1, row) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
  }
  const OperatorMatrix sm = sp.adjoint();
  SpinMatrices out;
  out.x = 0.5 * (sp + sm);
  out.y = cd(0.0, -0.5) * (sp - sm);
  out.z = sz;
  return out;
}

namespace {

void check_site(const OperatorMatrix& local, std::size_t site, const SpinSystemLayout& layout) {
  if (site >= layout.size()) {
    throw ConfigError("embed: site " + std::to_string(site) + " out of range for layout of " +
                      std::to_string(layout.size()) + " spins");
  }
  const auto expected = layout.species()[site].dimension();
  if (local.rows() != expected || local.cols() != expected) {
    throw ConfigError("embed: operator is " + std::to_string(local.rows()) + "x" +
                      std::to_string(local.cols()) + " but site " + std::to_string(site) +
                      " has dimension " + std::to_string(expected));
  }
}

}  // namespace

OperatorMatrix embed(const OperatorMatrix& local, std::size_t site, const SpinSystemLayout& layout) {
  check_site(local, site, layout);
  const auto before = static_cast<Eigen::Index>(layout.dimension_before(site));
  const auto after = static_cast<Eigen::Index>(layout.dimension_after(site));
  const auto d = local.rows();
  const auto n = static_cast<Eigen::Index>(layout.total_dimension());
  OperatorMatrix out = OperatorMatrix::Zero(n, n);
  // Index = (b * d + l) * after + a
  for (Eigen::Index b = 0; b < before; ++b) {
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const cd v = local(r, c);
        if (v == cd(0.0)) continue;
        const Eigen::Index row0 = (b * d + r) * after;
        const Eigen::Index col0 = (b * d + c) * after;
        for (Eigen::Index a = 0; a < after; ++a) out(row0 + a, col0 + a) = v;
      }
    }
  }
  return out;
}

void add_embedded_pair(OperatorMatrix& out, cd scale, const OperatorMatrix& a, std::size_t site_a,
                       const OperatorMatrix& b, std::size_t site_b, const SpinSystemLayout& layout) {
  if (site_a == site_b) throw ConfigError("embed_pair: sites must differ");
  if (site_a > site_b) return add_embedded_pair(out, scale, b, site_b, a, site_a, layout);
  check_site(a, site_a, layout);
  check_site(b, site_b, layout);
  const auto n = static_cast<Eigen::Index>(layout.total_dimension());
  if (out.rows() != n || out.cols() != n) throw ConfigError("embed_pair: target has the wrong dimension");
  const auto da = a.rows();
  const auto db = b.rows();
  const auto before = static_cast<Eigen::Index>(layout.dimension_before(site_a));
  const auto middle = static_cast<Eigen::Index>(layout.dimension_before(site_b) /
                                                (layout.dimension_before(site_a) * da));
  const auto after = static_cast<Eigen::Index>(layout.dimension_after(site_b));
  // Index = (((p * da + i) * middle + q) * db + j) * after + s
  for (Eigen::Index ra = 0; ra < da; ++ra) {
    for (Eigen::Index ca = 0; ca < da; ++ca) {
      const cd va = scale * a(ra, ca);
      if (va == cd(0.0)) continue;
      for (Eigen::Index rb = 0; rb < db; ++rb) {
        for (Eigen::Index cb = 0; cb < db; ++cb) {
          const cd v = va * b(rb, cb);
          if (v == cd(0.0)) continue;
          for (Eigen::Index p = 0; p < before; ++p) {
            for (Eigen::Index q = 0; q < middle; ++q) {
              const Eigen::Index row0 = (((p * da + ra) * middle + q) * db + rb) * after;
              const Eigen::Index col0 = (((p * da + ca) * middle + q) * db + cb) * after;
              for (Eigen::Index s = 0; s < after; ++s) out(row0 + s, col0 + s) += v;
            }
          }
        }
      }
    }
  }
}

OperatorMatrix embed_pair(const OperatorMatrix& a, std::size_t site_a, const OperatorMatrix& b,
                          std::size_t site_b, const SpinSystemLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.total_dimension());
  OperatorMatrix out = OperatorMatrix::Zero(n, n);
  add_embedded_pair(out, 1.0, a, site_a, b, site_b, layout);
  return out;
}

Eigen::Matrix3d rotation_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Eigen::Matrix3d rotation_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

Eigen::Matrix3d rotation_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Rotation euler_rotation(double alpha, double beta, double gamma) {
  Rotation r;
  r.euler_angles = {alpha, beta, gamma};
  r.matrix = rotation_x(alpha) * rotation_y(beta) * rotation_z(gamma);
  return r;
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  // Rx(a)Ry(b)Rz(c): m(0,2) = sin b, m(0,0) = cos b cos c, m(0,1) = -cos b sin c,
  // m(1,2) = -sin a cos b, m(2,2) = cos a cos b.
  Rotation r;
  r.matrix = m;
  const double sb = std::clamp(m(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  double a = 0.0, c = 0.0;
  if (std::abs(std::cos(b)) > 1e-12) {
    a = std::atan2(-m(1, 2), m(2, 2));
    c = std::atan2(-m(0, 1), m(0, 0));
  } else {
    // Gimbal lock: only a ± c is defined.
    a = std::atan2(m(2, 1), m(1, 1));
  }
  r.euler_angles = {a, b, c};
  return r;
}

Rotation Rotation::compose(const Rotation& inner) const { return from_matrix(matrix * inner.matrix); }

bool Rotation::is_identity(double tol) const {
  return (matrix - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol;
}

CouplingTensor rotate_tensor(const Rotation& rotation, const CouplingTensor& tensor) {
  return rotation.matrix * tensor * rotation.matrix.transpose();
}

CouplingTensor principal_tensor(double xx, double yy, double zz) {
  return Eigen::Vector3d(xx, yy, zz).asDiagonal();
}

CouplingTensor symmetrized(const CouplingTensor& tensor) {
  return 0.5 * (tensor + tensor.transpose());
}

}  // namespace rpnv
