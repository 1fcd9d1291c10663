#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "satsync/certify.hpp"
#include "satsync/dynamics.hpp"
#include "satsync/graph.hpp"
#include "satsync/io.hpp"
#include "satsync/linalg.hpp"
#include "satsync/protocol.hpp"
#include "satsync/sim.hpp"
#include "satsync/version.hpp"

namespace py = pybind11;
using namespace satsync;

PYBIND11_MODULE(_core, m) {
  m.doc() = "saturated double-integrator synchronization: simulation and certification";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Mode>(m, "Mode")
      .value("full_state", Mode::kFullState)
      .value("partial_state", Mode::kPartialState);

  py::enum_<ZetaBarForm>(m, "ZetaBarForm")
      .value("normalized", ZetaBarForm::kNormalized)
      .value("literal", ZetaBarForm::kLiteral);

  py::class_<GainSet>(m, "GainSet")
      .def(py::init([](double k1, double k2, double f1, double f2) {
             return GainSet{k1, k2, f1, f2};
           }),
           py::arg("k1"), py::arg("k2"), py::arg("f1") = 1.5, py::arg("f2") = 0.5)
      .def_readwrite("k1", &GainSet::k1)
      .def_readwrite("k2", &GainSet::k2)
      .def_readwrite("f1", &GainSet::f1)
      .def_readwrite("f2", &GainSet::f2)
      .def("__repr__", [](const GainSet& g) {
        return "GainSet(k1=" + std::to_string(g.k1) + ", k2=" + std::to_string(g.k2) +
               ", f1=" + std::to_string(g.f1) + ", f2=" + std::to_string(g.f2) + ")";
      });

  py::class_<Graph>(m, "Graph")
      .def(py::init<int, Matrix>(), py::arg("n_nodes"), py::arg("weights"))
      .def_property_readonly("n_nodes", &Graph::n_nodes)
      .def_property_readonly("weights", &Graph::weights);

  py::class_<RootSet>(m, "RootSet")
      .def(py::init<const std::vector<int>&, int>(), py::arg("members"),
           py::arg("n_nodes"))
      .def("contains", &RootSet::contains, py::arg("i"))
      .def_property_readonly("members", &RootSet::members);

  py::class_<DegreeBounds>(m, "DegreeBounds")
      .def(py::init<const Graph&, std::vector<double>>(), py::arg("graph"),
           py::arg("values"))
      .def_static("tight", &DegreeBounds::tight, py::arg("graph"))
      .def_property_readonly("values", &DegreeBounds::values)
      .def("__getitem__", &DegreeBounds::operator[], py::arg("i"));

  py::class_<NetworkMatrices>(m, "NetworkMatrices")
      .def_readonly("laplacian", &NetworkMatrices::laplacian)
      .def_readonly("expanded_laplacian", &NetworkMatrices::expanded_laplacian)
      .def_readonly("dbar", &NetworkMatrices::dbar);

  py::class_<FullStateController>(m, "FullStateController")
      .def(py::init<int, bool, double, const GainSet&>(), py::arg("n"),
           py::arg("in_root_set"), py::arg("degree_bound"), py::arg("gains"))
      .def("control", &FullStateController::control)
      .def("step", &FullStateController::step, py::arg("sat_u"),
           py::arg("zeta_bar"), py::arg("zeta_hat"))
      .def_property("chi", &FullStateController::chi, &FullStateController::set_chi)
      .def_property_readonly("n", &FullStateController::n);

  py::class_<PartialStateController>(m, "PartialStateController")
      .def(py::init<int, bool, double, const GainSet&>(), py::arg("n"),
           py::arg("in_root_set"), py::arg("degree_bound"), py::arg("gains"))
      .def("control", &PartialStateController::control)
      .def("step", &PartialStateController::step, py::arg("sat_u"),
           py::arg("zeta_bar"), py::arg("zeta_hat_chi"), py::arg("zeta_hat_sat"))
      .def_property("chi", &PartialStateController::chi,
                    &PartialStateController::set_chi)
      .def_property("xhat", &PartialStateController::xhat,
                    &PartialStateController::set_xhat)
      .def_property_readonly("n", &PartialStateController::n);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimConfig::n)
      .def_readwrite("graph", &SimConfig::graph)
      .def_readwrite("roots", &SimConfig::roots)
      .def_readwrite("bounds", &SimConfig::bounds)
      .def_readwrite("gains", &SimConfig::gains)
      .def_readwrite("mode", &SimConfig::mode)
      .def_readwrite("zeta_bar_form", &SimConfig::zeta_bar_form)
      .def_readwrite("steps", &SimConfig::steps)
      .def_readwrite("record_every", &SimConfig::record_every)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("init_low", &SimConfig::init_low)
      .def_readwrite("init_high", &SimConfig::init_high)
      .def_readwrite("agent_init", &SimConfig::agent_init)
      .def_readwrite("exo_init", &SimConfig::exo_init)
      .def_readwrite("chi_init", &SimConfig::chi_init)
      .def_readwrite("xhat_init", &SimConfig::xhat_init);

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("t", &Snapshot::t)
      .def_readonly("x", &Snapshot::x)
      .def_readonly("xr", &Snapshot::xr)
      .def_readonly("chi", &Snapshot::chi)
      .def_readonly("xhat", &Snapshot::xhat)
      .def_readonly("u", &Snapshot::u)
      .def_readonly("sat_u", &Snapshot::sat_u)
      .def_readonly("sync_error_inf", &Snapshot::sync_error_inf);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("n", &Trajectory::n)
      .def_readonly("n_agents", &Trajectory::n_agents)
      .def_readonly("mode", &Trajectory::mode)
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("warnings", &Trajectory::warnings);

  py::class_<SyncMetrics>(m, "SyncMetrics")
      .def_readonly("final_sync_error_inf", &SyncMetrics::final_sync_error_inf)
      .def_readonly("first_below_1e2", &SyncMetrics::first_below_1e2)
      .def_readonly("first_below_1e4", &SyncMetrics::first_below_1e4)
      .def_readonly("first_below_1e6", &SyncMetrics::first_below_1e6)
      .def_readonly("max_abs_u", &SyncMetrics::max_abs_u);

  py::class_<CertificationReport>(m, "CertificationReport")
      .def_readonly("n", &CertificationReport::n)
      .def_readonly("n_agents", &CertificationReport::n_agents)
      .def_readonly("mode", &CertificationReport::mode)
      .def_readonly("gains", &CertificationReport::gains)
      .def_readonly("graph_in_set", &CertificationReport::graph_in_set)
      .def_readonly("gains_in_region", &CertificationReport::gains_in_region)
      .def_readonly("rho_dbar", &CertificationReport::rho_dbar)
      .def_readonly("rho_dbar_kron_a", &CertificationReport::rho_dbar_kron_a)
      .def_readonly("rho_observer", &CertificationReport::rho_observer)
      .def_readonly("p_d", &CertificationReport::p_d)
      .def_readonly("pd_residual", &CertificationReport::pd_residual)
      .def_readonly("pd_min_eig", &CertificationReport::pd_min_eig)
      .def_readonly("psi_norm", &CertificationReport::psi_norm)
      .def_readonly("h", &CertificationReport::h)
      .def_readonly("phi_eigs", &CertificationReport::phi_eigs)
      .def_readonly("passed", &CertificationReport::pass)
      .def_readonly("reasons", &CertificationReport::reasons);

  py::class_<LyapunovTrace>(m, "LyapunovTrace")
      .def_readonly("t", &LyapunovTrace::t)
      .def_readonly("v1", &LyapunovTrace::v1)
      .def_readonly("v2", &LyapunovTrace::v2)
      .def_readonly("v", &LyapunovTrace::v)
      .def_readonly("dv", &LyapunovTrace::dv);

  m.def("saturate", py::overload_cast<double>(&saturate), py::arg("w"),
        "clamp to [-1, 1]");
  m.def("saturate", py::overload_cast<const Vector&>(&saturate), py::arg("w"),
        "componentwise clamp to [-1, 1]");
  m.def("agent_step", &agent_step, py::arg("x"), py::arg("u"));
  m.def("exo_step", &exo_step, py::arg("x"));
  m.def("output", &output, py::arg("x"));
  m.def("plant_a", &plant_a, py::arg("n"));
  m.def("plant_b", &plant_b, py::arg("n"));

  m.def("kron", &kron, py::arg("a"), py::arg("b"));
  m.def("spectral_radius", &spectral_radius, py::arg("m"));
  m.def("spectral_norm", &spectral_norm, py::arg("m"));
  m.def("solve_discrete_lyapunov", &solve_discrete_lyapunov, py::arg("m"),
        py::arg("q"));

  m.def("in_degrees", &in_degrees, py::arg("graph"));
  m.def("build_laplacian", &build_laplacian, py::arg("graph"));
  m.def("expand_laplacian", &expand_laplacian, py::arg("laplacian"), py::arg("roots"));
  m.def("build_dbar", &build_dbar, py::arg("expanded_laplacian"), py::arg("bounds"));
  m.def("in_graph_set", &in_graph_set, py::arg("graph"), py::arg("roots"));
  m.def("build_network_matrices", &build_network_matrices, py::arg("graph"),
        py::arg("roots"), py::arg("bounds"));

  m.def("gain_region_contains", &gain_region_contains, py::arg("k1"), py::arg("k2"));
  m.def("compute_zeta_bar", &compute_zeta_bar, py::arg("i"), py::arg("outputs"),
        py::arg("y_ref"), py::arg("graph"), py::arg("roots"), py::arg("bounds"),
        py::arg("form") = ZetaBarForm::kNormalized);
  m.def("compute_zeta_hat", &compute_zeta_hat, py::arg("i"), py::arg("broadcasts"),
        py::arg("graph"), py::arg("bounds"));
  m.def("observer_error_matrix", &observer_error_matrix, py::arg("n"),
        py::arg("f1"), py::arg("f2"));

  m.def("run", &run, py::arg("cfg"), py::arg("force") = false,
        "run the closed loop and return the recorded trajectory");
  m.def("sync_metrics", &sync_metrics, py::arg("trajectory"));
  m.def("seeded_states", &seeded_states, py::arg("seed"), py::arg("count"),
        py::arg("dim"), py::arg("low"), py::arg("high"));

  m.def("certify", &certify, py::arg("cfg"));
  m.def("phi_matrix", &phi_matrix, py::arg("k1"), py::arg("k2"), py::arg("h"),
        py::arg("psi_norm"));
  m.def("find_h", &find_h, py::arg("k1"), py::arg("k2"), py::arg("psi_norm"));
  m.def("lyapunov_trace", &lyapunov_trace, py::arg("trajectory"), py::arg("report"));

  m.def("parse_config", &parse_config, py::arg("text"),
        py::arg("enforce_gain_region") = true);
  m.def("config_to_json", &config_to_json, py::arg("cfg"));
  m.def("make_case_config", &make_case_config, py::arg("case_id"), py::arg("gains_id"));
  m.def("trajectory_csv", &trajectory_csv, py::arg("trajectory"));
  m.def("metrics_csv", &metrics_csv, py::arg("cfg"), py::arg("metrics"));
  m.def("certification_text", &certification_text, py::arg("report"));
  m.def("certification_json", &certification_json, py::arg("report"));
  m.def("lyapunov_csv", &lyapunov_csv, py::arg("trace"));
  m.def("fnv1a64_hex", &fnv1a64_hex, py::arg("text"));

  // one-shot string pipelines, handy from notebooks and shell pipes
  m.def("certify_config",
        [](const std::string& text) {
          return certification_json(certify(parse_config(text, false)));
        },
        py::arg("text"), "parse, certify, and return the report as JSON text");
  m.def("simulate_config",
        [](const std::string& text, bool force) {
          return sync_metrics(run(parse_config(text, false), force));
        },
        py::arg("text"), py::arg("force") = false,
        "parse and run, returning the synchronization metrics");
  m.def("case_config",
        [](const std::string& case_id, int gains_id) {
          return config_to_json(make_case_config(case_id, gains_id));
        },
        py::arg("case_id"), py::arg("gains_id"),
        "JSON text of a built-in benchmark configuration");
}
