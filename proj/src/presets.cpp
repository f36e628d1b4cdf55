#include "rpnv/presets.hpp"

#include "rpnv/errors.hpp"

#include <cstdio>

namespace rpnv {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Eigen::Matrix3d mat(std::initializer_list<double> v) {
  Eigen::Matrix3d m;
  auto it = v.begin();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = *it++;
  }
  return m;
}

NucleusSpec tensor_nucleus(std::string label, std::string spin, const Eigen::Matrix3d& t) {
  NucleusSpec n;
  n.label = std::move(label);
  n.spin = std::move(spin);
  n.tensor_mT = t;
  return n;
}

ExperimentConfig base(std::string name, ExperimentKind kind) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.kind = kind;
  return c;
}

ExperimentConfig appendix_angle_sweep(std::string name, const std::string& variant) {
  auto c = base(std::move(name), ExperimentKind::AngleSweep);
  c.radical_pair = appendix_radical_pair(appendix_principal(variant));
  c.field = {0.05, 0.0, 0.0};
  c.sweep.normalize = true;
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;

  {
    auto c = base("fig3-coupling-map", ExperimentKind::CouplingMap);
    c.description = "Effective NV-RP coupling g_eff/2pi over distance and field angle";
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig4a-time-trace", ExperimentKind::TimeTrace);
    c.description = "FAD-TrpH (2 nuclei/radical) single-molecule signal X(t) and spectrum at 1.16 mT";
    c.radical_pair = fad_trph_two_nuclei();
    c.field = {1.16, 0.0, 0.0};
    c.signal.mode = "single_molecule";
    c.geometry.r_nm = 10.0;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig4c-field-sweep", ExperimentKind::FieldSweep);
    c.description = "FAD-TrpH (2 nuclei/radical) single-molecule X^I vs |B| at theta = 0";
    c.radical_pair = fad_trph_two_nuclei();
    c.signal.mode = "single_molecule";
    c.geometry.r_nm = 10.0;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig4e-angle-sweep", ExperimentKind::AngleSweep);
    c.description = "FAD-TrpH (2 nuclei/radical) single-molecule X^I vs theta at 1.16 mT, raw and normalized";
    c.radical_pair = fad_trph_two_nuclei();
    c.field = {1.16, 0.0, 0.0};
    c.signal.mode = "single_molecule";
    c.geometry.r_nm = 10.0;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig5-ensemble", ExperimentKind::Ensemble);
    c.description = "Aligned vs randomly oriented ensembles of FAD-TrpH (2 nuclei/radical), 50 realizations";
    c.radical_pair = fad_trph_two_nuclei();
    c.sweep.b_values_mT = std::vector<double>{0.1, 0.5, 1.0, 1.16, 2.0, 5.0};
    c.seed = 20240601;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig6c-peak-count", ExperimentKind::PeakCount);
    c.description = "Resolved NV resonance peaks vs |B| for one FAD-TrpH RP (2 nuclei/radical), T2 = 100 us";
    c.radical_pair = fad_trph_two_nuclei();
    c.sensor.t2_us = 100.0;
    c.geometry.r_nm = 5.0;
    c.field = {1.0, 0.0, 0.0};
    c.sweep.b_spacing = "linear";
    c.sweep.b_min_mT = 0.01;
    c.sweep.b_max_mT = 5.0;
    c.sweep.b_points = 50;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = base("fig6c-peak-count-bare", ExperimentKind::PeakCount);
    c.description = "Resolved NV resonance peaks vs |B| for an RP without nuclei (N = 0)";
    c.radical_pair = fad_trph_two_nuclei();
    c.radical_pair.radical1.clear();
    c.radical_pair.radical2.clear();
    c.sensor.t2_us = 100.0;
    c.geometry.r_nm = 5.0;
    c.field = {1.0, 0.0, 0.0};
    c.sweep.b_spacing = "linear";
    c.sweep.b_min_mT = 0.01;
    c.sweep.b_max_mT = 5.0;
    c.sweep.b_points = 50;
    c.strong_coupling.contrast = true;
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = appendix_angle_sweep("fig7-hyperfine-anisotropy", "axial3");
    c.description = "One-nucleus model: X^I vs theta for iso, axial1, axial2, axial3, rhombic hyperfine";
    for (const auto& v : appendix_variants()) {
      VariantSpec var;
      var.label = v;
      var.principal_mT = appendix_principal(v);
      c.variants.push_back(var);
    }
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = appendix_angle_sweep("fig8-exchange-sweep", "axial3");
    c.description = "One-nucleus axial3 model: X^I and singlet yield vs theta for J_ex = 0, 0.25, 0.5, 1 mT";
    for (double j : {0.0, 0.25, 0.5, 1.0}) {
      VariantSpec var;
      var.label = "J" + fmt(j) + "mT";
      var.j_exchange_mT = j;
      c.variants.push_back(var);
    }
    out.push_back({c.name, c.description, c});
  }
  {
    auto c = appendix_angle_sweep("fig9-lifetime-sweep", "axial3");
    c.description = "One-nucleus axial3 model at 50 uT: X^I and singlet yield vs theta for tau = 1, 2, 5, 10 us";
    for (double tau : {1.0, 2.0, 5.0, 10.0}) {
      VariantSpec var;
      var.label = "tau" + fmt(tau) + "us";
      var.lifetime_us = tau;
      c.variants.push_back(var);
    }
    out.push_back({c.name, c.description, c});
  }
  for (const auto& v : appendix_variants()) {
    auto c = appendix_angle_sweep("appendix-" + v, v);
    const auto p = appendix_principal(v);
    c.description = "One-nucleus model '" + v + "' (" + fmt(p[0]) + ", " + fmt(p[1]) + ", " + fmt(p[2]) +
                    ") mT, J_ex = 0.25 mT, tau = 5 us, X^I vs theta";
    out.push_back({c.name, c.description, c});
  }
  return out;
}

}  // namespace

RadicalPairSpec fad_trph_two_nuclei() {
  RadicalPairSpec s;
  // Representative values (mT) in the molecular frame; edit configs/ for other choices.
  s.radical1.push_back(tensor_nucleus("N5", "1", mat({-0.0989, 0.0039, 0.0, 0.0039, -0.0881, 0.0, 0.0, 0.0, 1.7569})));
  s.radical1.push_back(tensor_nucleus("N10", "1", mat({-0.0190, -0.0048, 0.0, -0.0048, -0.0196, 0.0, 0.0, 0.0, 0.6046})));
  s.radical2.push_back(tensor_nucleus("N1", "1", mat({-0.0336, 0.0924, -0.1354, 0.0924, 0.3303, -0.5318, -0.1354, -0.5318, 0.6680})));
  s.radical2.push_back(tensor_nucleus("H1", "1/2", mat({-0.2645, -0.0999, 0.0158, -0.0999, -0.4633, 0.0343, 0.0158, 0.0343, -0.5283})));
  s.j_exchange_mT = 0.01;
  s.dipolar_r_nm = 2.0;
  s.recombination_rate_per_s = 2e5;
  return s;
}

RadicalPairSpec appendix_radical_pair(const Eigen::Vector3d& principal_mT) {
  RadicalPairSpec s;
  NucleusSpec n;
  n.spin = "1";
  n.principal_mT = principal_mT;
  n.label = "N5a";
  s.radical1.push_back(n);
  n.label = "N5b";
  s.radical2.push_back(n);
  s.j_exchange_mT = 0.25;
  s.recombination_rate_per_s = 2e5;
  return s;
}

const std::vector<std::string>& appendix_variants() {
  static const std::vector<std::string> v{"iso", "axial1", "axial2", "axial3", "rhombic"};
  return v;
}

Eigen::Vector3d appendix_principal(const std::string& variant) {
  if (variant == "iso") return {0.5, 0.5, 0.5};
  if (variant == "axial1") return {-0.09, -0.09, 1.76};
  if (variant == "axial2") return {-0.2, -0.2, 1.76};
  if (variant == "axial3") return {-0.39, -0.39, 1.76};
  if (variant == "rhombic") return {-0.39, 0.0, 1.76};
  throw ConfigError("unknown hyperfine variant '" + variant + "'");
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::optional<ExperimentConfig> find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.config;
  }
  return std::nullopt;
}

}  // namespace rpnv
