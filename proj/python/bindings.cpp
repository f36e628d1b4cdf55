#include "rpnv/config.hpp"
#include "rpnv/errors.hpp"
#include "rpnv/hamiltonian.hpp"
#include "rpnv/presets.hpp"
#include "rpnv/runner.hpp"
#include "rpnv/signal.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;

namespace {

rpnv::ExperimentConfig resolve(const std::string& preset_or_json) {
  if (auto p = rpnv::find_preset(preset_or_json)) return *p;
  return rpnv::parse_config_text(preset_or_json);
}

py::dict run(const std::string& preset_or_json, const std::string& out_dir, bool oracle,
             std::optional<unsigned> threads) {
  rpnv::RunOptions opts;
  opts.out_dir = out_dir;
  opts.oracle = oracle;
  opts.threads = threads;
  rpnv::RunReport report;
  {
    py::gil_scoped_release release;
    report = rpnv::run_experiment(resolve(preset_or_json), opts);
  }
  py::dict d;
  std::vector<std::string> files;
  for (const auto& f : report.files) files.push_back(f.string());
  d["files"] = files;
  d["warnings"] = report.warnings;
  d["oracle_deviation"] = report.oracle_deviation;
  d["wall_time_s"] = report.wall_time_s;
  return d;
}

py::dict angle_sweep(const std::string& preset_or_json, std::vector<double> theta_deg) {
  const auto cfg = resolve(preset_or_json);
  const auto rp = cfg.radical_pair.build();
  std::vector<double> grid;
  for (double t : theta_deg) grid.push_back(rpnv::deg_to_rad(t));
  rpnv::SweepOptions so;
  so.evolution = cfg.evolution();
  rpnv::SweepResult res;
  {
    py::gil_scoped_release release;
    res = rpnv::sweep_field_angle(rp, cfg.field.magnitude_mT, grid, rpnv::deg_to_rad(cfg.field.phi_deg),
                                  cfg.sensor.build(), false, so);
  }
  py::dict d;
  d["theta_deg"] = theta_deg;
  d["x"] = res.component(0);
  d["y"] = res.component(1);
  d["z"] = res.component(2);
  d["singlet_yield"] = res.singlet_yields();
  return d;
}

}  // namespace

PYBIND11_MODULE(_rpnv, m) {
  m.doc() = "Radical-pair spin dynamics and NV readout";
  m.attr("__version__") = RPNV_VERSION;

  m.def("preset_names", &rpnv::preset_names);
  m.def("preset_config", [](const std::string& name) {
    auto p = rpnv::find_preset(name);
    if (!p) throw py::key_error(name);
    return rpnv::canonical_text(*p);
  });
  m.def("canonical_config", [](const std::string& text) {
    return rpnv::canonical_text(rpnv::parse_config_text(text));
  });
  m.def("config_hash", [](const std::string& s) { return rpnv::config_hash(resolve(s)); },
        py::arg("preset_or_json"));

  m.def("coupling_factors", &rpnv::coupling_factors, py::arg("theta"), py::arg("phi") = 0.0);
  m.def("dipolar_prefactor", [](double r_nm) { return rpnv::dipolar_prefactor(r_nm); }, py::arg("r_nm"));
  m.def("g_eff", [](double r_nm, double theta, double phi) {
    return rpnv::coupling_geometry(r_nm, theta, phi).g_eff;
  }, py::arg("r_nm"), py::arg("theta"), py::arg("phi") = 0.0);

  m.def("angle_sweep", &angle_sweep, py::arg("preset_or_json"), py::arg("theta_deg"),
        "Raw X^I components (T) and singlet yield over field angles in degrees.");
  m.def("run", &run, py::arg("preset_or_json"), py::arg("out_dir"), py::arg("oracle") = false,
        py::arg("threads") = py::none());

  py::register_exception<rpnv::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<rpnv::PhysicsError>(m, "PhysicsError", PyExc_ValueError);
  py::register_exception<rpnv::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
}
