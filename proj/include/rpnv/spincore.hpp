#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rpnv {

using OperatorMatrix = Eigen::MatrixXcd;

/// 3×3 real coupling tensor. Hyperfine, exchange and dipolar inputs are in mT.
using CouplingTensor = Eigen::Matrix3d;

/// A spin-1/2 or spin-1 particle. The spin is stored as 2s to keep it exact.
struct SpinSpecies {
  std::string label;
  int two_s = 1;

  static SpinSpecies electron(std::string label) { return {std::move(label), 1}; }
  static SpinSpecies spin_half(std::string label) { return {std::move(label), 1}; }
  static SpinSpecies spin_one(std::string label) { return {std::move(label), 2}; }

  double spin() const { return 0.5 * two_s; }
  int dimension() const { return two_s + 1; }

  bool operator==(const SpinSpecies&) const = default;
};

/// Ordered product space: [electron 1, electron 2, nuclei of radical 1, nuclei of radical 2].
class SpinSystemLayout {
 public:
  SpinSystemLayout(std::vector<SpinSpecies> species, std::size_t nuclei_on_radical1);

  const std::vector<SpinSpecies>& species() const { return species_; }
  std::size_t size() const { return species_.size(); }
  std::size_t total_dimension() const { return total_dimension_; }
  std::size_t nuclear_dimension() const { return total_dimension_ / 4; }
  std::size_t nuclei_count() const { return species_.size() - 2; }
  std::size_t nuclei_on_radical1() const { return nuclei_on_radical1_; }

  /// Site index of the i-th nucleus of radical 1 (or 2).
  std::size_t radical1_site(std::size_t i) const { return 2 + i; }
  std::size_t radical2_site(std::size_t j) const { return 2 + nuclei_on_radical1_ + j; }

  /// Dimension of all sites before / after `site` (Kronecker strides).
  std::size_t dimension_before(std::size_t site) const;
  std::size_t dimension_after(std::size_t site) const;

  static SpinSystemLayout electrons_only();

 private:
  std::vector<SpinSpecies> species_;
  std::size_t nuclei_on_radical1_;
  std::size_t total_dimension_;
};

struct SpinMatrices {
  OperatorMatrix x, y, z;
  const OperatorMatrix& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Angular-momentum matrices in the |m = +s, ..., -s> basis (ħ = 1).
SpinMatrices spin_matrices(const SpinSpecies& species);

/// I ⊗ … ⊗ local ⊗ … ⊗ I with `local` on `site`.
OperatorMatrix embed(const OperatorMatrix& local, std::size_t site, const SpinSystemLayout& layout);

/// I ⊗ … ⊗ a ⊗ … ⊗ b ⊗ … ⊗ I, for two distinct sites. Built directly without forming
/// two full-size operators and multiplying them.
OperatorMatrix embed_pair(const OperatorMatrix& a, std::size_t site_a, const OperatorMatrix& b,
                          std::size_t site_b, const SpinSystemLayout& layout);

/// out += scale · embed_pair(a, site_a, b, site_b), without a temporary.
void add_embedded_pair(OperatorMatrix& out, std::complex<double> scale, const OperatorMatrix& a,
                       std::size_t site_a, const OperatorMatrix& b, std::size_t site_b,
                       const SpinSystemLayout& layout);

/// Proper rotation R = Rx(α)·Ry(β)·Rz(γ).
struct Rotation {
  std::array<double, 3> euler_angles{0.0, 0.0, 0.0};
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();

  static Rotation identity() { return {}; }
  /// Wraps an arbitrary orthogonal matrix; Euler angles are recovered for the x-y-z convention.
  static Rotation from_matrix(const Eigen::Matrix3d& m);
  Rotation compose(const Rotation& inner) const;  // this · inner
  bool is_identity(double tol = 0.0) const;
};

Eigen::Matrix3d rotation_x(double angle);
Eigen::Matrix3d rotation_y(double angle);
Eigen::Matrix3d rotation_z(double angle);

Rotation euler_rotation(double alpha, double beta, double gamma);

/// T' = R·T·Rᵀ.
CouplingTensor rotate_tensor(const Rotation& rotation, const CouplingTensor& tensor);

/// Diagonal tensor with the given principal components.
CouplingTensor principal_tensor(double xx, double yy, double zz);

CouplingTensor symmetrized(const CouplingTensor& tensor);

}  // namespace rpnv
