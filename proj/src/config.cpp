#include "rpnv/config.hpp"

#include "rpnv/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rpnv {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string type_name(const json& j) { return std::string(j.type_name()); }

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + type_name(j));
  return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
    fail(path, "expected a non-negative integer, got " + (j.is_number() ? j.dump() : type_name(j)));
  }
  return j.get<std::uint64_t>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer, got " + type_name(j));
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false, got " + type_name(j));
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers, got " + type_name(j));
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Eigen::Vector3d as_vec3(const json& j, const std::string& path) {
  const auto v = as_vector(j, path);
  if (v.size() != 3) fail(path, "expected 3 numbers, got " + std::to_string(v.size()));
  return {v[0], v[1], v[2]};
}

Eigen::Matrix3d as_mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected a 3x3 array of rows");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) m.row(r) = as_vec3(j[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]");
  return m;
}

json mat3_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

json vec3_json(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

void check_choice(const std::string& value, const std::vector<std::string>& allowed, const std::string& path) {
  if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  std::string msg = "invalid value '" + value + "' (allowed: " + list + ")";
  const auto near = nearest_name(value, allowed);
  if (!near.empty()) msg += "; did you mean '" + near + "'?";
  fail(path, msg);
}

// Tracks which keys of an object were consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object, got " + type_name(j_));
  }

  const json* find(const std::string& key) {
    allowed_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = as_double(*v, at(key));
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (const auto* v = find(key)) out = as_double(*v, at(key));
  }
  void size(const std::string& key, std::size_t& out) {
    if (const auto* v = find(key)) out = static_cast<std::size_t>(as_uint(*v, at(key)));
  }
  void size(const std::string& key, std::optional<std::size_t>& out) {
    if (const auto* v = find(key)) out = static_cast<std::size_t>(as_uint(*v, at(key)));
  }
  void integer(const std::string& key, int& out) {
    if (const auto* v = find(key)) out = as_int(*v, at(key));
  }
  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) out = as_bool(*v, at(key));
  }
  void string(const std::string& key, std::string& out, const std::vector<std::string>& allowed = {}) {
    if (const auto* v = find(key)) {
      out = as_string(*v, at(key));
      if (!allowed.empty()) check_choice(out, allowed, at(key));
    }
  }
  void vec3(const std::string& key, Eigen::Vector3d& out) {
    if (const auto* v = find(key)) out = as_vec3(*v, at(key));
  }
  void vec3(const std::string& key, std::optional<Eigen::Vector3d>& out) {
    if (const auto* v = find(key)) out = as_vec3(*v, at(key));
  }
  void mat3(const std::string& key, std::optional<Eigen::Matrix3d>& out) {
    if (const auto* v = find(key)) out = as_mat3(*v, at(key));
  }
  void vector(const std::string& key, std::optional<std::vector<double>>& out) {
    if (const auto* v = find(key)) out = as_vector(*v, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(allowed_.begin(), allowed_.end(), it.key()) != allowed_.end()) continue;
      std::string msg = "unknown key";
      const auto near = nearest_name(it.key(), allowed_);
      if (!near.empty()) msg += "; did you mean '" + near + "'?";
      fail(at(it.key()), msg);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> allowed_;
};

NucleusSpec parse_nucleus(const json& j, const std::string& path) {
  Reader r(j, path);
  NucleusSpec n;
  r.string("label", n.label);
  r.string("spin", n.spin, {"1/2", "1"});
  r.mat3("tensor_mT", n.tensor_mT);
  r.vec3("principal_mT", n.principal_mT);
  r.vec3("euler_deg", n.euler_deg);
  r.finish();
  if (n.tensor_mT.has_value() == n.principal_mT.has_value()) {
    fail(path, "give exactly one of 'tensor_mT' or 'principal_mT'");
  }
  return n;
}

std::vector<NucleusSpec> parse_nuclei(const json* j, const std::string& path) {
  std::vector<NucleusSpec> out;
  if (!j) return out;
  if (!j->is_array()) fail(path, "expected an array of nuclei, got " + type_name(*j));
  for (std::size_t i = 0; i < j->size(); ++i) {
    out.push_back(parse_nucleus((*j)[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json nucleus_json(const NucleusSpec& n) {
  json j{{"label", n.label}, {"spin", n.spin}, {"euler_deg", vec3_json(n.euler_deg)}};
  if (n.tensor_mT) j["tensor_mT"] = mat3_json(*n.tensor_mT);
  if (n.principal_mT) j["principal_mT"] = vec3_json(*n.principal_mT);
  return j;
}

RadicalPairSpec parse_radical_pair(const json& j, const std::string& path) {
  Reader r(j, path);
  RadicalPairSpec s;
  s.radical1 = parse_nuclei(r.find("radical1"), r.at("radical1"));
  s.radical2 = parse_nuclei(r.find("radical2"), r.at("radical2"));
  r.number("j_exchange_mT", s.j_exchange_mT);
  r.number("dipolar_r_nm", s.dipolar_r_nm);
  r.mat3("dipolar_tensor_mT", s.dipolar_tensor_mT);
  r.number("recombination_rate_per_s", s.recombination_rate_per_s);
  r.string("initial_state", s.initial_state, {"singlet", "triplet_zero"});
  r.vec3("orientation_euler_deg", s.orientation_euler_deg);
  r.finish();
  if (s.dipolar_r_nm && s.dipolar_tensor_mT) {
    fail(path, "give at most one of 'dipolar_r_nm' or 'dipolar_tensor_mT'");
  }
  return s;
}

json radical_pair_json(const RadicalPairSpec& s) {
  json r1 = json::array(), r2 = json::array();
  for (const auto& n : s.radical1) r1.push_back(nucleus_json(n));
  for (const auto& n : s.radical2) r2.push_back(nucleus_json(n));
  json j{{"radical1", r1},
         {"radical2", r2},
         {"j_exchange_mT", s.j_exchange_mT},
         {"recombination_rate_per_s", s.recombination_rate_per_s},
         {"initial_state", s.initial_state},
         {"orientation_euler_deg", vec3_json(s.orientation_euler_deg)}};
  if (s.dipolar_r_nm) j["dipolar_r_nm"] = *s.dipolar_r_nm;
  if (s.dipolar_tensor_mT) j["dipolar_tensor_mT"] = mat3_json(*s.dipolar_tensor_mT);
  return j;
}

VariantSpec parse_variant(const json& j, const std::string& path) {
  Reader r(j, path);
  VariantSpec v;
  r.string("label", v.label);
  r.number("j_exchange_mT", v.j_exchange_mT);
  r.number("lifetime_us", v.lifetime_us);
  r.vec3("principal_mT", v.principal_mT);
  r.finish();
  if (v.label.empty()) fail(path, "variant needs a non-empty 'label'");
  return v;
}

json variant_json(const VariantSpec& v) {
  json j{{"label", v.label}};
  if (v.j_exchange_mT) j["j_exchange_mT"] = *v.j_exchange_mT;
  if (v.lifetime_us) j["lifetime_us"] = *v.lifetime_us;
  if (v.principal_mT) j["principal_mT"] = vec3_json(*v.principal_mT);
  return j;
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names{"time_trace", "field_sweep", "angle_sweep",
                                              "ensemble",   "peak_count",  "coupling_map"};
  return names;
}

}  // namespace

Nucleus NucleusSpec::build() const {
  const SpinSpecies species = spin == "1" ? SpinSpecies::spin_one(label) : SpinSpecies::spin_half(label);
  CouplingTensor t;
  if (tensor_mT) {
    t = *tensor_mT;
  } else if (principal_mT) {
    const Rotation rot = euler_rotation(deg_to_rad(euler_deg[0]), deg_to_rad(euler_deg[1]),
                                        deg_to_rad(euler_deg[2]));
    t = rotate_tensor(rot, principal_tensor((*principal_mT)[0], (*principal_mT)[1], (*principal_mT)[2]));
  } else {
    throw ConfigError("nucleus '" + label + "': no hyperfine tensor");
  }
  return {species, symmetrized(t)};
}

RadicalPairConfig RadicalPairSpec::build() const {
  RadicalPairConfig cfg;
  for (const auto& n : radical1) cfg.radical1.push_back(n.build());
  for (const auto& n : radical2) cfg.radical2.push_back(n.build());
  cfg.j_exchange_mT = j_exchange_mT;
  cfg.dipolar.r_rp_nm = dipolar_r_nm;
  cfg.dipolar.tensor_mT = dipolar_tensor_mT;
  cfg.recombination_rate = recombination_rate_per_s;
  cfg.initial_state = initial_state == "triplet_zero" ? ElectronState::TripletZero : ElectronState::Singlet;
  cfg.validate();
  return cfg;
}

Rotation RadicalPairSpec::orientation() const {
  return euler_rotation(deg_to_rad(orientation_euler_deg[0]), deg_to_rad(orientation_euler_deg[1]),
                        deg_to_rad(orientation_euler_deg[2]));
}

FieldConfig FieldSpec::build() const {
  FieldConfig f{magnitude_mT, deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
  f.validate();
  return f;
}

SensorParams SensorSpec::build() const {
  SensorParams s;
  s.t2 = t2_us * 1e-6;
  s.depth_nm = depth_nm;
  s.r1_nm = r1_nm;
  s.r2_nm = r2_nm;
  s.density_per_nm3 = density_per_nm3;
  s.validate();
  return s;
}

std::vector<double> SweepSpec::field_grid_mT() const {
  if (b_values_mT) return *b_values_mT;
  if (b_spacing == "log") return log_grid(b_min_mT, b_max_mT, b_points);
  if (b_points < 2 || !(b_max_mT > b_min_mT)) throw ConfigError("sweep: need b_points >= 2 and b_max > b_min");
  std::vector<double> g(b_points);
  for (std::size_t i = 0; i < b_points; ++i) {
    g[i] = b_min_mT + (b_max_mT - b_min_mT) * static_cast<double>(i) / static_cast<double>(b_points - 1);
  }
  return g;
}

std::vector<double> SweepSpec::theta_grid_rad() const {
  std::vector<double> deg;
  if (theta_values_deg) {
    deg = *theta_values_deg;
  } else {
    if (!(theta_step_deg > 0.0) || theta_max_deg < theta_min_deg) {
      throw ConfigError("sweep: need theta_step_deg > 0 and theta_max_deg >= theta_min_deg");
    }
    const auto n = static_cast<std::size_t>(std::floor((theta_max_deg - theta_min_deg) / theta_step_deg + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) deg.push_back(theta_min_deg + theta_step_deg * static_cast<double>(i));
  }
  std::vector<double> rad;
  for (double d : deg) rad.push_back(std::clamp(deg_to_rad(d), 0.0, constants::kPi));
  return rad;
}

EnsembleSpec EnsembleConfig::build(OrientationMode mode, std::uint64_t seed, double density) const {
  EnsembleSpec s;
  s.n_realizations = n_realizations;
  s.orientation = mode;
  s.r_min_nm = r_min_nm;
  s.r_max_nm = r_max_nm;
  s.seed = seed;
  s.count_mode = count_mode == "fixed" ? CountMode::Fixed : CountMode::Poisson;
  s.fixed_count = fixed_count;
  s.max_count = max_count;
  s.density_per_nm3 = density;
  s.uniform_angles = uniform_angles;
  s.validate();
  return s;
}

RadicalPairSpec VariantSpec::apply(const RadicalPairSpec& base) const {
  RadicalPairSpec out = base;
  if (j_exchange_mT) out.j_exchange_mT = *j_exchange_mT;
  if (lifetime_us) {
    if (!(*lifetime_us > 0.0)) throw PhysicsError("variant '" + label + "': lifetime must be > 0");
    out.recombination_rate_per_s = 1.0 / (*lifetime_us * 1e-6);
  }
  if (principal_mT) {
    for (auto* list : {&out.radical1, &out.radical2}) {
      for (auto& n : *list) {
        n.tensor_mT.reset();
        n.principal_mT = *principal_mT;
      }
    }
  }
  return out;
}

DecayConvention ExperimentConfig::decay() const {
  return decay_convention == "rate_2k" ? DecayConvention::Rate2K : DecayConvention::RateK;
}

EvolutionOptions ExperimentConfig::evolution() const {
  EvolutionOptions e;
  e.decay = decay();
  e.min_samples = time_grid.min_samples;
  if (time_grid.t_max_us && time_grid.samples) {
    e.grid = TimeGrid::uniform(*time_grid.t_max_us * 1e-6, *time_grid.samples);
  } else if (time_grid.t_max_us || time_grid.samples) {
    throw ConfigError("time_grid: give both 't_max_us' and 'samples', or neither");
  }
  return e;
}

std::string to_string(ExperimentKind kind) { return kind_names()[static_cast<std::size_t>(kind)]; }

ExperimentKind parse_experiment_kind(const std::string& s) {
  const auto& names = kind_names();
  const auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) check_choice(s, names, "kind");
  return static_cast<ExperimentKind>(it - names.begin());
}

ExperimentConfig parse_config(const json& j) {
  Reader r(j, "$");
  ExperimentConfig c;
  r.string("name", c.name);
  r.string("description", c.description);
  if (const auto* k = r.find("kind")) {
    const auto s = as_string(*k, r.at("kind"));
    check_choice(s, kind_names(), r.at("kind"));
    c.kind = parse_experiment_kind(s);
  }
  if (const auto* v = r.find("seed")) c.seed = as_uint(*v, r.at("seed"));
  if (const auto* v = r.find("threads")) c.threads = static_cast<unsigned>(as_uint(*v, r.at("threads")));
  r.string("decay_convention", c.decay_convention, {"rate_k", "rate_2k"});

  if (const auto* v = r.find("radical_pair")) c.radical_pair = parse_radical_pair(*v, r.at("radical_pair"));
  if (const auto* v = r.find("field")) {
    Reader s(*v, r.at("field"));
    s.number("magnitude_mT", c.field.magnitude_mT);
    s.number("theta_deg", c.field.theta_deg);
    s.number("phi_deg", c.field.phi_deg);
    s.finish();
  }
  if (const auto* v = r.find("sensor")) {
    Reader s(*v, r.at("sensor"));
    s.number("t2_us", c.sensor.t2_us);
    s.number("depth_nm", c.sensor.depth_nm);
    s.number("r1_nm", c.sensor.r1_nm);
    s.number("r2_nm", c.sensor.r2_nm);
    s.number("density_per_nm3", c.sensor.density_per_nm3);
    s.finish();
  }
  if (const auto* v = r.find("geometry")) {
    Reader s(*v, r.at("geometry"));
    s.number("r_nm", c.geometry.r_nm);
    s.number("alpha_deg", c.geometry.alpha_deg);
    s.number("beta_deg", c.geometry.beta_deg);
    s.finish();
  }
  if (const auto* v = r.find("time_grid")) {
    Reader s(*v, r.at("time_grid"));
    s.number("t_max_us", c.time_grid.t_max_us);
    s.size("samples", c.time_grid.samples);
    s.size("min_samples", c.time_grid.min_samples);
    s.finish();
  }
  if (const auto* v = r.find("sweep")) {
    Reader s(*v, r.at("sweep"));
    s.vector("b_values_mT", c.sweep.b_values_mT);
    s.number("b_min_mT", c.sweep.b_min_mT);
    s.number("b_max_mT", c.sweep.b_max_mT);
    s.size("b_points", c.sweep.b_points);
    s.string("b_spacing", c.sweep.b_spacing, {"log", "linear"});
    s.boolean("densify", c.sweep.densify);
    s.boolean("allow_tilted", c.sweep.allow_tilted);
    s.vector("theta_values_deg", c.sweep.theta_values_deg);
    s.number("theta_min_deg", c.sweep.theta_min_deg);
    s.number("theta_max_deg", c.sweep.theta_max_deg);
    s.number("theta_step_deg", c.sweep.theta_step_deg);
    s.boolean("normalize", c.sweep.normalize);
    s.finish();
  }
  if (const auto* v = r.find("signal")) {
    Reader s(*v, r.at("signal"));
    s.string("mode", c.signal.mode, {"max_aligned", "volume", "single_molecule"});
    s.string("orientation", c.signal.orientation, {"aligned", "fixed", "radial"});
    s.integer("alpha_nodes", c.signal.alpha_nodes);
    s.integer("beta_nodes", c.signal.beta_nodes);
    s.finish();
  }
  if (const auto* v = r.find("ensemble")) {
    Reader s(*v, r.at("ensemble"));
    s.size("n_realizations", c.ensemble.n_realizations);
    if (const auto* m = s.find("modes")) {
      if (!m->is_array()) fail(s.at("modes"), "expected an array of strings");
      c.ensemble.modes.clear();
      for (std::size_t i = 0; i < m->size(); ++i) {
        const auto path = s.at("modes") + "[" + std::to_string(i) + "]";
        const auto mode = as_string((*m)[i], path);
        check_choice(mode, {"aligned", "random_euler"}, path);
        c.ensemble.modes.push_back(mode);
      }
    }
    s.number("r_min_nm", c.ensemble.r_min_nm);
    s.number("r_max_nm", c.ensemble.r_max_nm);
    s.string("count_mode", c.ensemble.count_mode, {"poisson", "fixed"});
    s.size("fixed_count", c.ensemble.fixed_count);
    s.size("max_count", c.ensemble.max_count);
    s.boolean("uniform_angles", c.ensemble.uniform_angles);
    s.finish();
  }
  if (const auto* v = r.find("strong_coupling")) {
    Reader s(*v, r.at("strong_coupling"));
    s.boolean("allow_weak", c.strong_coupling.allow_weak);
    s.number("amplitude_floor", c.strong_coupling.amplitude_floor);
    s.boolean("contrast", c.strong_coupling.contrast);
    s.size("contrast_samples", c.strong_coupling.contrast_samples);
    s.finish();
  }
  if (const auto* v = r.find("coupling_map")) {
    Reader s(*v, r.at("coupling_map"));
    s.number("r_min_nm", c.coupling_map.r_min_nm);
    s.number("r_max_nm", c.coupling_map.r_max_nm);
    s.size("r_points", c.coupling_map.r_points);
    s.size("theta_points", c.coupling_map.theta_points);
    s.finish();
  }
  if (const auto* v = r.find("variants")) {
    if (!v->is_array()) fail(r.at("variants"), "expected an array of variants");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.variants.push_back(parse_variant((*v)[i], r.at("variants") + "[" + std::to_string(i) + "]"));
    }
  }
  r.finish();
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["description"] = c.description;
  j["kind"] = to_string(c.kind);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["decay_convention"] = c.decay_convention;
  j["radical_pair"] = radical_pair_json(c.radical_pair);
  j["field"] = {{"magnitude_mT", c.field.magnitude_mT}, {"theta_deg", c.field.theta_deg},
                {"phi_deg", c.field.phi_deg}};
  j["sensor"] = {{"t2_us", c.sensor.t2_us},   {"depth_nm", c.sensor.depth_nm},
                 {"r1_nm", c.sensor.r1_nm},   {"r2_nm", c.sensor.r2_nm},
                 {"density_per_nm3", c.sensor.density_per_nm3}};
  j["geometry"] = {{"r_nm", c.geometry.r_nm}, {"alpha_deg", c.geometry.alpha_deg},
                   {"beta_deg", c.geometry.beta_deg}};
  json tg{{"min_samples", c.time_grid.min_samples}};
  if (c.time_grid.t_max_us) tg["t_max_us"] = *c.time_grid.t_max_us;
  if (c.time_grid.samples) tg["samples"] = *c.time_grid.samples;
  j["time_grid"] = tg;
  json sw{{"b_min_mT", c.sweep.b_min_mT},         {"b_max_mT", c.sweep.b_max_mT},
          {"b_points", c.sweep.b_points},         {"b_spacing", c.sweep.b_spacing},
          {"densify", c.sweep.densify},           {"allow_tilted", c.sweep.allow_tilted},
          {"theta_min_deg", c.sweep.theta_min_deg}, {"theta_max_deg", c.sweep.theta_max_deg},
          {"theta_step_deg", c.sweep.theta_step_deg}, {"normalize", c.sweep.normalize}};
  if (c.sweep.b_values_mT) sw["b_values_mT"] = *c.sweep.b_values_mT;
  if (c.sweep.theta_values_deg) sw["theta_values_deg"] = *c.sweep.theta_values_deg;
  j["sweep"] = sw;
  j["signal"] = {{"mode", c.signal.mode}, {"orientation", c.signal.orientation},
                 {"alpha_nodes", c.signal.alpha_nodes}, {"beta_nodes", c.signal.beta_nodes}};
  j["ensemble"] = {{"n_realizations", c.ensemble.n_realizations}, {"modes", c.ensemble.modes},
                   {"r_min_nm", c.ensemble.r_min_nm},   {"r_max_nm", c.ensemble.r_max_nm},
                   {"count_mode", c.ensemble.count_mode}, {"fixed_count", c.ensemble.fixed_count},
                   {"max_count", c.ensemble.max_count}, {"uniform_angles", c.ensemble.uniform_angles}};
  j["strong_coupling"] = {{"allow_weak", c.strong_coupling.allow_weak},
                          {"amplitude_floor", c.strong_coupling.amplitude_floor},
                          {"contrast", c.strong_coupling.contrast},
                          {"contrast_samples", c.strong_coupling.contrast_samples}};
  j["coupling_map"] = {{"r_min_nm", c.coupling_map.r_min_nm}, {"r_max_nm", c.coupling_map.r_max_nm},
                       {"r_points", c.coupling_map.r_points},
                       {"theta_points", c.coupling_map.theta_points}};
  json vars = json::array();
  for (const auto& v : c.variants) vars.push_back(variant_json(v));
  j["variants"] = vars;
  return j;
}

std::string canonical_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates) {
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      }
      std::swap(prev, cur);
    }
    return prev[b.size()];
  };
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& c : candidates) {
    const auto d = distance(name, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  const std::size_t limit = std::max<std::size_t>(3, name.size() / 2);
  return best_d <= limit ? best : std::string();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_text(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rpnv
