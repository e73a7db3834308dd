#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ifcascade/analysis.hpp"
#include "ifcascade/cascade.hpp"
#include "ifcascade/delayed_sim.hpp"
#include "ifcascade/errors.hpp"
#include "ifcascade/particle_sim.hpp"
#include "ifcascade/paths.hpp"

namespace py = pybind11;
using namespace ifc;

namespace {

DriftSpec drift_from_string(const std::string& text) {
  if (text == "zero") return DriftSpec::zero();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  std::istringstream in(args);
  if (kind == "constant") {
    double c;
    char sep;
    in >> c;
    (void)sep;
    return DriftSpec::constant(c);
  }
  if (kind == "affine") {
    double a, b;
    char sep;
    in >> a >> sep >> b;
    return DriftSpec::affine(a, b);
  }
  throw ConfigError("unknown drift '" + text + "' (use the typed factories)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "simulator and M1 path toolkit for the singular mean-field "
            "integrate-and-fire model";

  py::register_exception<ConfigError>(m, "ConfigError");

  py::enum_<Interp>(m, "Interp")
      .value("LINEAR", Interp::Linear)
      .value("STEP", Interp::Step);

  py::class_<CadlagPath>(m, "CadlagPath")
      .def(py::init<std::vector<double>, std::vector<double>, Interp>(),
           py::arg("times"), py::arg("values"),
           py::arg("interp") = Interp::Linear)
      .def(py::init<std::vector<double>, std::vector<double>, Interp,
                    std::vector<std::size_t>, std::vector<double>>(),
           py::arg("times"), py::arg("values"), py::arg("interp"),
           py::arg("jump_indices"), py::arg("jump_left_values"))
      .def_static("constant", &CadlagPath::constant, py::arg("value"),
                  py::arg("horizon"))
      .def_property_readonly("times", &CadlagPath::times)
      .def_property_readonly("values", &CadlagPath::values)
      .def_property_readonly("horizon", &CadlagPath::horizon)
      .def("evaluate", &CadlagPath::evaluate, py::arg("t"))
      .def("evaluate_left", &CadlagPath::evaluate_left, py::arg("t"))
      .def("is_jump", &CadlagPath::is_jump, py::arg("index"))
      .def("left_value", &CadlagPath::left_value, py::arg("index"))
      .def("jump_count", &CadlagPath::jump_count)
      .def("hat", &CadlagPath::hat)
      .def("__len__", &CadlagPath::size);

  py::class_<ParametricRepresentation>(m, "ParametricRepresentation")
      .def_readonly("u", &ParametricRepresentation::u)
      .def_readonly("r", &ParametricRepresentation::r);

  m.def("counting_map", &counting_map, py::arg("z"));
  m.def("oscillation_w", &oscillation_w, py::arg("f"), py::arg("t"),
        py::arg("delta"));
  m.def("oscillation_v", &oscillation_v, py::arg("f"), py::arg("t"),
        py::arg("delta"));
  m.def("m1_distance", &m1_distance, py::arg("f"), py::arg("g"),
        py::arg("resolution") = 2000);
  m.def("build_parametric", &build_parametric, py::arg("f"),
        py::arg("resolution"));
  m.def("graph_contains", &graph_contains, py::arg("f"), py::arg("u"),
        py::arg("r"), py::arg("eps") = 1e-9);
  m.def("write_path_csv",
        py::overload_cast<const CadlagPath&, const std::string&>(
            &write_path_csv),
        py::arg("path"), py::arg("filename"));
  m.def("read_path_csv",
        py::overload_cast<const std::string&, Interp>(&read_path_csv),
        py::arg("filename"), py::arg("interp"));

  py::class_<SpikeState>(m, "SpikeState")
      .def(py::init([](std::vector<double> potentials, double alpha) {
             return SpikeState{std::move(potentials), alpha};
           }),
           py::arg("potentials"), py::arg("alpha"))
      .def_readonly("potentials", &SpikeState::potentials)
      .def_readonly("alpha", &SpikeState::alpha);

  py::class_<CascadeResult>(m, "CascadeResult")
      .def_readonly("gamma", &CascadeResult::gamma)
      .def_readonly("rounds", &CascadeResult::rounds)
      .def_readonly("post_potentials", &CascadeResult::post_potentials)
      .def_readonly("jump_fraction", &CascadeResult::jump_fraction)
      .def("spike_count", &CascadeResult::spike_count);

  m.def("resolve_cascade", &resolve_cascade, py::arg("state"));
  m.def("cascade_size_inf", &cascade_size_inf, py::arg("state"));
  m.def("physical_jump_size", &physical_jump_size, py::arg("samples"),
        py::arg("alpha"));
  m.def(
      "physical_criterion_check",
      [](const std::vector<double>& samples, double alpha, double jump,
         std::size_t grid) {
        const auto report = physical_criterion_check(samples, alpha, jump,
                                                     grid);
        return py::make_tuple(report.pass, report.worst_margin,
                              report.worst_eta);
      },
      py::arg("samples"), py::arg("alpha"), py::arg("jump"),
      py::arg("grid") = 200);

  py::class_<InitialLaw>(m, "InitialLaw")
      .def_static("point_mass", &InitialLaw::point_mass, py::arg("x0"),
                  py::arg("epsilon0") = 0.1)
      .def_static("uniform", &InitialLaw::uniform, py::arg("lo"),
                  py::arg("hi"), py::arg("epsilon0") = 0.1)
      .def_static("truncated_gaussian", &InitialLaw::truncated_gaussian,
                  py::arg("mean"), py::arg("sigma"), py::arg("hi"),
                  py::arg("epsilon0") = 0.1)
      .def_static("explicit_values", &InitialLaw::explicit_values,
                  py::arg("values"), py::arg("epsilon0") = 1e-3);

  py::class_<DriftSpec>(m, "DriftSpec")
      .def_static("zero", &DriftSpec::zero)
      .def_static("constant", &DriftSpec::constant, py::arg("c"))
      .def_static("affine", &DriftSpec::affine, py::arg("slope"),
                  py::arg("intercept"))
      .def_static("piecewise_linear", &DriftSpec::piecewise_linear,
                  py::arg("xs"), py::arg("ys"))
      .def("lipschitz_constant", &DriftSpec::lipschitz_constant)
      .def_static("from_string", &drift_from_string, py::arg("text"));

  m.def("drift_eval", &drift_eval, py::arg("spec"), py::arg("x"));
  m.def("sample_initial", &sample_initial, py::arg("law"), py::arg("n"),
        py::arg("seed"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimConfig::n)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("alpha", &SimConfig::alpha)
      .def_readwrite("drift", &SimConfig::drift)
      .def_readwrite("init", &SimConfig::init)
      .def_readwrite("noise_scale", &SimConfig::noise_scale)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("record_trajectories", &SimConfig::record_trajectories)
      .def_readwrite("record_limit", &SimConfig::record_limit)
      .def_readwrite("capture_fraction", &SimConfig::capture_fraction);

  py::class_<CascadeEvent>(m, "CascadeEvent")
      .def_readonly("time", &CascadeEvent::time)
      .def_readonly("gamma_size", &CascadeEvent::gamma_size)
      .def_readonly("jump_fraction", &CascadeEvent::jump_fraction)
      .def_readonly("round_sizes", &CascadeEvent::round_sizes)
      .def_readonly("pre_hist", &CascadeEvent::pre_hist)
      .def_readonly("pre_samples", &CascadeEvent::pre_samples)
      .def_readonly("criterion_pass", &CascadeEvent::criterion_pass);

  py::class_<SimOutput>(m, "SimOutput")
      .def_readonly("n", &SimOutput::n)
      .def_readonly("alpha", &SimOutput::alpha)
      .def_readonly("ebar", &SimOutput::ebar)
      .def_readonly("events", &SimOutput::events)
      .def_readonly("z_paths", &SimOutput::z_paths)
      .def_readonly("m_paths", &SimOutput::m_paths)
      .def_readonly("mean_sup_abs_z", &SimOutput::mean_sup_abs_z)
      .def_readonly("mean_m_terminal_sq", &SimOutput::mean_m_terminal_sq);

  m.def("run_particle_system", &run_particle_system, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<DelayedConfig>(m, "DelayedConfig")
      .def(py::init<>())
      .def_readwrite("delta", &DelayedConfig::delta)
      .def_readwrite("replicas", &DelayedConfig::replicas)
      .def_readwrite("horizon", &DelayedConfig::horizon)
      .def_readwrite("dt", &DelayedConfig::dt)
      .def_readwrite("alpha", &DelayedConfig::alpha)
      .def_readwrite("drift", &DelayedConfig::drift)
      .def_readwrite("init", &DelayedConfig::init)
      .def_readwrite("noise_scale", &DelayedConfig::noise_scale)
      .def_readwrite("seed", &DelayedConfig::seed)
      .def_readwrite("record_replicas", &DelayedConfig::record_replicas);

  py::class_<DelayedOutput>(m, "DelayedOutput")
      .def_readonly("e_delta", &DelayedOutput::e_delta)
      .def_readonly("sample_m_paths", &DelayedOutput::sample_m_paths)
      .def_readonly("replica_count", &DelayedOutput::replica_count);

  m.def("run_delayed", &run_delayed, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_delayed_with_input", &run_delayed_with_input, py::arg("config"),
        py::arg("e_input"), py::call_guard<py::gil_scoped_release>());

  py::class_<JumpEvent>(m, "JumpEvent")
      .def_readonly("time", &JumpEvent::time)
      .def_readonly("size", &JumpEvent::size)
      .def_readonly("criterion_pass", &JumpEvent::criterion_pass)
      .def_readonly("pre_samples", &JumpEvent::pre_samples)
      .def_readonly("has_samples", &JumpEvent::has_samples);

  m.def("detect_jumps",
        py::overload_cast<const CadlagPath&, double>(&detect_jumps),
        py::arg("e"), py::arg("threshold") = 0.05);
  m.def("detect_run_jumps",
        py::overload_cast<const SimOutput&, double>(&detect_jumps),
        py::arg("run"), py::arg("threshold") = 0.05);

  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("pass_", &VerifyReport::pass)
      .def_readonly("unverifiable", &VerifyReport::unverifiable)
      .def_readonly("recomputed", &VerifyReport::recomputed)
      .def_readonly("reported", &VerifyReport::reported);

  m.def("verify_physical_jump", &verify_physical_jump, py::arg("event"),
        py::arg("alpha"));

  py::class_<FiringRateResult>(m, "FiringRateResult")
      .def_readonly("rate", &FiringRateResult::rate)
      .def_readonly("jump_times", &FiringRateResult::jump_times);

  m.def("firing_rate", &firing_rate, py::arg("e"), py::arg("bandwidth"),
        py::arg("jump_threshold") = 0.05);
}
