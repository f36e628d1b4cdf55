#include "rpnv/hamiltonian.hpp"

#include "rpnv/errors.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace rpnv {

namespace {
using cd = std::complex<double>;

void check_finite(const CouplingTensor& t, const std::string& what) {
  if (!t.allFinite()) throw ConfigError(what + ": non-finite tensor entry");
}
}  // namespace

CouplingTensor DipolarCoupling::tensor() const {
  if (tensor_mT) return *tensor_mT;
  if (r_rp_nm) {
    const double ds_mT = angular_to_millitesla(secular_dipolar_coupling(*r_rp_nm));
    // S₁·D·S₂ = D_s (3 S₁zS₂z - S₁·S₂)
    return principal_tensor(-ds_mT, -ds_mT, 2.0 * ds_mT);
  }
  return CouplingTensor::Zero();
}

SpinSystemLayout RadicalPairConfig::layout() const {
  std::vector<SpinSpecies> species{SpinSpecies::electron("e1"), SpinSpecies::electron("e2")};
  for (const auto& n : radical1) species.push_back(n.species);
  for (const auto& n : radical2) species.push_back(n.species);
  return SpinSystemLayout(std::move(species), radical1.size());
}

void RadicalPairConfig::validate() const {
  if (radical1.size() > 3 || radical2.size() > 3) {
    throw ConfigError("at most 3 nuclei per radical are supported (got " +
                      std::to_string(radical1.size()) + ", " + std::to_string(radical2.size()) +
                      ")");
  }
  for (const auto* list : {&radical1, &radical2}) {
    for (const auto& n : *list) {
      if (n.species.two_s != 1 && n.species.two_s != 2) {
        throw ConfigError("nucleus '" + n.species.label + "': spin must be 1/2 or 1");
      }
      check_finite(n.hyperfine_mT, "nucleus '" + n.species.label + "'");
    }
  }
  if (dipolar.tensor_mT && dipolar.r_rp_nm) {
    throw ConfigError("dipolar coupling: give either a tensor or r_rp_nm, not both");
  }
  if (dipolar.tensor_mT) check_finite(*dipolar.tensor_mT, "dipolar tensor");
  if (dipolar.r_rp_nm && !(*dipolar.r_rp_nm > 0.0)) {
    throw PhysicsError("dipolar coupling: r_rp_nm must be > 0");
  }
  if (!std::isfinite(j_exchange_mT)) throw ConfigError("j_exchange_mT must be finite");
  if (!(recombination_rate >= 0.0) || !std::isfinite(recombination_rate)) {
    throw PhysicsError("recombination rate k must be >= 0 (got " +
                       std::to_string(recombination_rate) + ")");
  }
}

Eigen::Vector3d FieldConfig::vector_mT() const {
  return magnitude_mT * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                        std::sin(theta) * std::sin(phi), std::cos(theta));
}

void FieldConfig::validate() const {
  if (!(magnitude_mT >= 0.0)) throw PhysicsError("field magnitude must be >= 0");
  if (theta < 0.0 || theta > constants::kPi + 1e-12) throw ConfigError("theta must lie in [0, pi]");
  if (phi < 0.0 || phi >= constants::kTwoPi) throw ConfigError("phi must lie in [0, 2pi)");
}

double SensorParams::gamma_hz() const { return 1.0 / (constants::kPi * t2); }

void SensorParams::validate() const {
  if (!(t2 > 0.0)) throw PhysicsError("T2 must be > 0");
  if (!(r1_nm > 0.0)) throw PhysicsError("sensing shell r1 must be > 0 (r1 = 0 diverges)");
  if (!(r2_nm > r1_nm)) throw PhysicsError("sensing shell requires r2 > r1");
  if (!(density_per_nm3 >= 0.0)) throw PhysicsError("density must be >= 0");
}

SensorParams SensorParams::single_molecule(double r_nm, double density_per_nm3, double t2) {
  if (!(r_nm > 0.0) || !(density_per_nm3 > 0.0)) {
    throw PhysicsError("single_molecule: r and density must be > 0");
  }
  // Hemispherical shell of volume 2πr²δ ≈ 1/ξ.
  const double delta = 1.0 / (density_per_nm3 * constants::kTwoPi * r_nm * r_nm);
  SensorParams s;
  s.t2 = t2;
  s.r1_nm = r_nm - 0.5 * delta;
  s.r2_nm = r_nm + 0.5 * delta;
  s.density_per_nm3 = density_per_nm3;
  if (!(s.r1_nm > 0.0)) throw PhysicsError("single_molecule: density too low for this distance");
  return s;
}

SpinOperators::SpinOperators(SpinSystemLayout layout) : layout_(std::move(layout)) {
  const auto e = spin_matrices(SpinSpecies::electron("e"));
  for (int i = 0; i < 3; ++i) {
    s1_[static_cast<std::size_t>(i)] = embed(e[i], 0, layout_);
    s2_[static_cast<std::size_t>(i)] = embed(e[i], 1, layout_);
    total_[static_cast<std::size_t>(i)] = s1_[static_cast<std::size_t>(i)] + s2_[static_cast<std::size_t>(i)];
  }
  s1_dot_s2_ = OperatorMatrix::Zero(dimension(), dimension());
  for (int i = 0; i < 3; ++i) s1_dot_s2_ += embed_pair(e[i], 0, e[i], 1, layout_);

  // |S₀⟩ = (|↑↓⟩ - |↓↑⟩)/√2 in the electron basis {↑↑, ↑↓, ↓↑, ↓↓}.
  Eigen::Matrix4cd ps = Eigen::Matrix4cd::Zero();
  ps(1, 1) = 0.5;
  ps(2, 2) = 0.5;
  ps(1, 2) = -0.5;
  ps(2, 1) = -0.5;
  const auto nuc = static_cast<Eigen::Index>(layout_.nuclear_dimension());
  singlet_projector_ = OperatorMatrix::Zero(dimension(), dimension());
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      if (ps(r, c) == cd(0.0)) continue;
      for (Eigen::Index a = 0; a < nuc; ++a) singlet_projector_(r * nuc + a, c * nuc + a) = ps(r, c);
    }
  }
}

OperatorMatrix SpinOperators::s1_s2(int i, int j) const {
  const auto e = spin_matrices(SpinSpecies::electron("e"));
  return embed_pair(e[i], 0, e[j], 1, layout_);
}

OperatorMatrix SpinOperators::hyperfine_term(int electron, std::size_t nucleus_site,
                                             const Eigen::Matrix3d& coupling) const {
  OperatorMatrix out = OperatorMatrix::Zero(dimension(), dimension());
  add_hyperfine_term(out, electron, nucleus_site, coupling);
  return out;
}

void SpinOperators::add_hyperfine_term(OperatorMatrix& h, int electron, std::size_t nucleus_site,
                                       const Eigen::Matrix3d& coupling) const {
  const auto e = spin_matrices(SpinSpecies::electron("e"));
  const auto n = spin_matrices(layout_.species().at(nucleus_site));
  for (int j = 0; j < 3; ++j) {
    // Σᵢ Aᵢⱼ Sᵢ as a single 2×2 factor, then one Kronecker embedding per nuclear component.
    OperatorMatrix left = OperatorMatrix::Zero(2, 2);
    for (int i = 0; i < 3; ++i) left += coupling(i, j) * e[i];
    if (left.cwiseAbs().maxCoeff() == 0.0) continue;
    add_embedded_pair(h, 1.0, left, static_cast<std::size_t>(electron), n[j], nucleus_site, layout_);
  }
}

OperatorMatrix build_nv_hamiltonian(const NVParams& nv, double b0z_mT) {
  if (!(nv.d_zfs_hz > 0.0)) throw PhysicsError("D_ZFS must be > 0");
  const auto nitrogen = spin_matrices(SpinSpecies::spin_one("14N"));
  Eigen::Matrix2cd jz = Eigen::Matrix2cd::Zero();
  jz(1, 1) = 1.0;  // {|0⟩, |+1⟩}
  const double level = constants::kTwoPi * nv.d_zfs_hz + millitesla_to_angular(b0z_mT, nv.gamma_e);
  const double a_par = constants::kTwoPi * nv.a_n_parallel_hz;
  OperatorMatrix h = OperatorMatrix::Zero(6, 6);
  const Eigen::Matrix3cd id3 = Eigen::Matrix3cd::Identity();
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      h.block(3 * r, 3 * c, 3, 3) = level * jz(r, c) * id3 + a_par * jz(r, c) * nitrogen.z;
    }
  }
  return h;
}

double secular_dipolar_coupling(double r_rp_nm, const PhysicalConstants& pc) {
  return dipolar_prefactor(r_rp_nm, pc);
}

double dipolar_prefactor(double r_nm, const PhysicalConstants& pc) {
  if (!(r_nm > 0.0)) throw PhysicsError("dipolar coupling is singular at r = 0");
  const double r = nm_to_m(r_nm);
  return -pc.mu0 * pc.gamma_e * pc.gamma_e * pc.hbar / (4.0 * constants::kPi * r * r * r);
}

OperatorMatrix build_rp_hamiltonian(const SpinOperators& ops, const RadicalPairConfig& cfg,
                                    const FieldConfig& field, const Rotation& rotation) {
  const auto& layout = ops.layout();
  if (layout.nuclei_on_radical1() != cfg.radical1.size() ||
      layout.nuclei_count() != cfg.radical1.size() + cfg.radical2.size()) {
    throw ConfigError("build_rp_hamiltonian: nucleus lists do not match the spin layout");
  }
  for (std::size_t i = 0; i < cfg.radical1.size(); ++i) {
    if (layout.species()[layout.radical1_site(i)].two_s != cfg.radical1[i].species.two_s) {
      throw ConfigError("build_rp_hamiltonian: radical-1 species mismatch at nucleus " +
                        std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < cfg.radical2.size(); ++j) {
    if (layout.species()[layout.radical2_site(j)].two_s != cfg.radical2[j].species.two_s) {
      throw ConfigError("build_rp_hamiltonian: radical-2 species mismatch at nucleus " +
                        std::to_string(j));
    }
  }

  const Eigen::Index n = ops.dimension();
  OperatorMatrix h = OperatorMatrix::Zero(n, n);

  const Eigen::Vector3d b = field.vector_mT();
  for (int i = 0; i < 3; ++i) {
    if (b[i] != 0.0) h -= millitesla_to_angular(b[i]) * ops.total(i);
  }
  if (cfg.j_exchange_mT != 0.0) h -= 2.0 * millitesla_to_angular(cfg.j_exchange_mT) * ops.s1_dot_s2();

  const auto e = spin_matrices(SpinSpecies::electron("e"));
  const Eigen::Matrix3d d = rotate_tensor(rotation, cfg.dipolar.tensor());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (d(i, j) == 0.0) continue;
      add_embedded_pair(h, millitesla_to_angular(d(i, j)), e[i], 0, e[j], 1, layout);
    }
  }

  for (std::size_t i = 0; i < cfg.radical1.size(); ++i) {
    const Eigen::Matrix3d a = rotate_tensor(rotation, cfg.radical1[i].hyperfine_mT) *
                              millitesla_to_angular(1.0);
    ops.add_hyperfine_term(h, 0, layout.radical1_site(i), a);
  }
  for (std::size_t j = 0; j < cfg.radical2.size(); ++j) {
    const Eigen::Matrix3d a = rotate_tensor(rotation, cfg.radical2[j].hyperfine_mT) *
                              millitesla_to_angular(1.0);
    ops.add_hyperfine_term(h, 1, layout.radical2_site(j), a);
  }
  return h;
}

OperatorMatrix build_rp_hamiltonian(const RadicalPairConfig& cfg, const FieldConfig& field,
                                    const Rotation& rotation) {
  return build_rp_hamiltonian(SpinOperators(cfg.layout()), cfg, field, rotation);
}

SecularSplit split_secular(const SpinOperators& ops, const RadicalPairConfig& cfg,
                           const FieldConfig& field, const Rotation& rotation) {
  SecularSplit out;
  const OperatorMatrix full = build_rp_hamiltonian(ops, cfg, field, rotation);
  const Eigen::Index n = ops.dimension();
  out.diagonal = OperatorMatrix::Zero(n, n);
  const double bz = field.vector_mT()[2];
  if (bz != 0.0) out.diagonal -= millitesla_to_angular(bz) * ops.total(2);
  if (cfg.j_exchange_mT != 0.0) {
    out.diagonal -= 2.0 * millitesla_to_angular(cfg.j_exchange_mT) * ops.s1_dot_s2();
  }
  // Only D_zz S₁zS₂z and the flip-flop part (D_xx + D_yy)/2 (S₁xS₂x + S₁yS₂y) are diagonal in
  // {S, T₀, T±}. For the point-dipole tensor this is D_s (3 S₁zS₂z - S₁·S₂).
  const auto e = spin_matrices(SpinSpecies::electron("e"));
  const Eigen::Matrix3d d = rotate_tensor(rotation, cfg.dipolar.tensor());
  if (d(2, 2) != 0.0) out.diagonal += millitesla_to_angular(d(2, 2)) * ops.s1_s2(2, 2);
  const double flip = 0.5 * (d(0, 0) + d(1, 1));
  if (flip != 0.0) {
    out.diagonal += millitesla_to_angular(flip) * (ops.s1_s2(0, 0) + ops.s1_s2(1, 1));
  }
  out.nondiagonal = full - out.diagonal;
  return out;
}

SecularSplit split_secular(const RadicalPairConfig& cfg, const FieldConfig& field,
                           const Rotation& rotation) {
  return split_secular(SpinOperators(cfg.layout()), cfg, field, rotation);
}

Eigen::Vector3d coupling_factors(double theta, double phi) {
  return {1.5 * std::sin(2.0 * theta) * std::cos(phi), 1.5 * std::sin(2.0 * theta) * std::sin(phi),
          3.0 * std::cos(theta) * std::cos(theta) - 1.0};
}

CouplingGeometry coupling_geometry(double r_nm, double theta, double phi, const Rotation& rotation,
                                   double alpha, double beta) {
  if (!(r_nm > 0.0)) throw PhysicsError("coupling_geometry: r must be > 0 (got " + std::to_string(r_nm) + ")");
  CouplingGeometry g;
  g.r_nm = r_nm;
  g.d_r = dipolar_prefactor(r_nm);
  g.d_c = coupling_factors(theta, phi);
  // Exact zeros where the trigonometric factors vanish analytically.
  if (std::sin(2.0 * theta) == 0.0 || std::abs(std::sin(2.0 * theta)) < 1e-15) {
    g.d_c[0] = 0.0;
    g.d_c[1] = 0.0;
  }
  if (phi == 0.0) g.d_c[1] = 0.0;
  g.g_eff = 2.0 * std::abs(g.d_r) * g.d_c.norm();
  g.rotation = rotation;
  g.alpha = alpha;
  g.beta = beta;
  return g;
}

OperatorMatrix build_coupling_hamiltonian(const CouplingGeometry& geom, const SpinOperators& ops) {
  const Eigen::Index n = ops.dimension();
  OperatorMatrix h = OperatorMatrix::Zero(n, n);
  for (int i = 0; i < 3; ++i) {
    if (geom.d_c[i] != 0.0) h += geom.d_r * geom.d_c[i] * ops.total(i);
  }
  return h;
}

OperatorMatrix build_coupling_hamiltonian(const CouplingGeometry& geom,
                                          const SpinSystemLayout& layout) {
  return build_coupling_hamiltonian(geom, SpinOperators(layout));
}

RegimeClassification classify_regime(double g_eff, const SensorParams& sensor) {
  if (!(sensor.t2 > 0.0)) throw PhysicsError("classify_regime: T2 must be > 0");
  const double coupling_hz = g_eff / constants::kTwoPi;
  const double gamma = sensor.gamma_hz();
  RegimeClassification out;
  if (coupling_hz > gamma) {
    out.regime = Regime::Strong;
  } else {
    out.regime = Regime::Weak;
    out.on_boundary = std::abs(coupling_hz - gamma) <= 1e-12 * gamma;
  }
  return out;
}

std::string to_string(Regime regime) { return regime == Regime::Weak ? "weak" : "strong"; }

std::string to_string(ElectronState state) {
  return state == ElectronState::Singlet ? "singlet" : "triplet_zero";
}

}  // namespace rpnv
