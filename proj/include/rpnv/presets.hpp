#pragma once

#include "rpnv/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rpnv {

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

/// All shipped presets in listing order. Each call returns fresh copies.
const std::vector<Preset>& presets();
std::vector<std::string> preset_names();
std::optional<ExperimentConfig> find_preset(const std::string& name);

/// Building blocks the presets are made from (representative hyperfine values).
RadicalPairSpec fad_trph_two_nuclei();
RadicalPairSpec appendix_radical_pair(const Eigen::Vector3d& principal_mT);

/// Principal components (A_xx, A_yy, A_zz) in mT of the one-nucleus model variants.
Eigen::Vector3d appendix_principal(const std::string& variant);
const std::vector<std::string>& appendix_variants();

}  // namespace rpnv
