#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqi/acceptance.hpp"
#include "cqi/core_model.hpp"
#include "cqi/error.hpp"
#include "cqi/lindblad.hpp"
#include "cqi/protocol.hpp"
#include "cqi/sweeps.hpp"

namespace py = pybind11;
using namespace cqi;

namespace {

sweeps::EvalOptions eval_options(std::optional<double> window, double transmission)
{
    sweeps::EvalOptions opts;
    opts.protocol.detection_window = window;
    opts.protocol.transmission = transmission;
    return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Cooperative and cascaded quantum interface models";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ModelValidityError>(m, "ModelValidityError", PyExc_ArithmeticError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);

    py::enum_<Scheme>(m, "Scheme").value("cqi", Scheme::cqi).value("cas", Scheme::cas);

    py::class_<DeviceParams>(m, "DeviceParams")
        .def(py::init<>())
        .def(py::init([](py::kwargs kw) {
            DeviceParams p;
            py::object obj = py::cast(&p, py::return_value_policy::reference);
            for (auto item : kw) {
                const auto key = item.first.cast<std::string>();
                if (!py::hasattr(obj, key.c_str())) throw py::type_error("unknown DeviceParams field '" + key + "'");
                obj.attr(key.c_str()) = item.second;
            }
            return p;
        }))
        .def_readwrite("kappa_a_o", &DeviceParams::kappa_a_o)
        .def_readwrite("kappa_a_ex", &DeviceParams::kappa_a_ex)
        .def_readwrite("kappa_b_o", &DeviceParams::kappa_b_o)
        .def_readwrite("kappa_b_ex", &DeviceParams::kappa_b_ex)
        .def_readwrite("g_conv", &DeviceParams::g_conv)
        .def_readwrite("mu", &DeviceParams::mu)
        .def_readwrite("gamma", &DeviceParams::gamma)
        .def_readwrite("n_th", &DeviceParams::n_th)
        .def_readwrite("delta_b_offset", &DeviceParams::delta_b_offset)
        .def_readwrite("delta_q_offset", &DeviceParams::delta_q_offset)
        .def_readwrite("cqi_b_external_is_loss", &DeviceParams::cqi_b_external_is_loss)
        .def_property_readonly("kappa_a", &DeviceParams::kappa_a)
        .def("validate", &DeviceParams::validate)
        .def("__eq__", [](const DeviceParams& a, const DeviceParams& b) { return a == b; })
        .def("__repr__", [](const DeviceParams& p) {
            return "DeviceParams(kappa_a_o=" + std::to_string(p.kappa_a_o) + ", kappa_a_ex=" +
                   std::to_string(p.kappa_a_ex) + ", kappa_b_o=" + std::to_string(p.kappa_b_o) +
                   ", kappa_b_ex=" + std::to_string(p.kappa_b_ex) + ", g_conv=" + std::to_string(p.g_conv) +
                   ", mu=" + std::to_string(p.mu) + ", gamma=" + std::to_string(p.gamma) +
                   ", n_th=" + std::to_string(p.n_th) + ")";
        });

    m.def("cooperativities", [](const DeviceParams& p, Scheme s) {
        const auto c = model::cooperativities(p, s);
        return py::make_tuple(c.c_ab, c.c_bq);
    }, py::arg("params"), py::arg("scheme") = Scheme::cqi);
    m.def("response", &model::response, py::arg("scheme"), py::arg("params"), py::arg("delta"),
          py::arg("qubit_coupled"));
    m.def("converter_transmission", &model::converter_transmission, py::arg("params"), py::arg("delta"));
    m.def("qubit_cavity_response", &model::qubit_cavity_response, py::arg("params"), py::arg("delta"),
          py::arg("qubit_coupled"));
    m.def("conversion_efficiency", &model::conversion_efficiency, py::arg("params"));
    m.def("conversion_efficiency_bound", &model::conversion_efficiency_bound, py::arg("params"));
    m.def("impedance_matched", &model::impedance_matched, py::arg("params"));

    m.def("me_response", [](const DeviceParams& p, double amplitude, double delta, bool coupled) {
        const auto r = lindblad::me_response(p, {amplitude, delta}, coupled, lindblad::default_fock(p.n_th));
        return py::make_tuple(r.f, r.phi_inc);
    }, py::arg("params"), py::arg("amplitude"), py::arg("delta"), py::arg("qubit_coupled"));
    m.def("thermal_leak_flux", [](const DeviceParams& p, double delta, bool coupled, Scheme s) {
        return lindblad::thermal_leak_flux(p, delta, coupled, lindblad::default_fock(p.n_th), s);
    }, py::arg("params"), py::arg("delta"), py::arg("qubit_coupled"), py::arg("scheme") = Scheme::cqi);

    py::class_<protocol::NodeResponse>(m, "NodeResponse")
        .def(py::init([](Complex f_s, Complex f_g, double nu) { return protocol::NodeResponse{f_s, f_g, nu}; }),
             py::arg("f_s") = Complex(1.0), py::arg("f_g") = Complex(-1.0), py::arg("nu") = 0.0)
        .def_readwrite("f_s", &protocol::NodeResponse::f_s)
        .def_readwrite("f_g", &protocol::NodeResponse::f_g)
        .def_readwrite("nu", &protocol::NodeResponse::nu);

    py::class_<protocol::LinkResult>(m, "LinkResult")
        .def_readonly("fidelity", &protocol::LinkResult::fidelity)
        .def_readonly("success_prob", &protocol::LinkResult::success_prob)
        .def_readonly("no_click_prob", &protocol::LinkResult::no_click_prob)
        .def_property_readonly("figure_of_merit", &protocol::LinkResult::figure_of_merit);

    py::class_<protocol::NetworkResult>(m, "NetworkResult")
        .def_readonly("n_nodes", &protocol::NetworkResult::n_nodes)
        .def_readonly("ghz_fidelity", &protocol::NetworkResult::ghz_fidelity)
        .def_readonly("total_success", &protocol::NetworkResult::total_success)
        .def_readonly("figure_of_merit", &protocol::NetworkResult::figure_of_merit)
        .def_readonly("round_success", &protocol::NetworkResult::round_success);

    m.def("link_entangle", &protocol::link_entangle, py::arg("node1"), py::arg("node2"),
          py::arg("transmission") = 1.0);
    m.def("ghz_chain", [](const protocol::NodeResponse& node, int n_nodes, double transmission) {
        const std::vector<protocol::LinkSpec> links(n_nodes > 1 ? n_nodes - 1 : 0,
                                                    protocol::LinkSpec{node, node, transmission});
        return protocol::ghz_chain(links, n_nodes);
    }, py::arg("node"), py::arg("n_nodes"), py::arg("transmission") = 1.0);
    m.def("compose_network", &protocol::compose_network, py::arg("link"), py::arg("n_nodes"));
    m.def("zeta", py::overload_cast<const protocol::LinkResult&, const protocol::LinkResult&>(&protocol::zeta));

    m.def("node_response", [](const DeviceParams& p, Scheme s, double delta, std::optional<double> window) {
        const auto opts = eval_options(window, 1.0);
        return sweeps::node_response(p, s, delta, sweeps::noise_model(p, s, opts));
    }, py::arg("params"), py::arg("scheme"), py::arg("delta") = 0.0, py::arg("detection_window") = py::none());
    m.def("optimize_detuning", [](const DeviceParams& p, Scheme s, std::optional<double> window) {
        const auto r = sweeps::optimize_detuning(p, p.n_th, s, eval_options(window, 1.0));
        return py::make_tuple(r.delta_star, r.f_star);
    }, py::arg("params"), py::arg("scheme") = Scheme::cqi, py::arg("detection_window") = py::none());

    m.def("selftest", [](bool quick) {
        acceptance::Options opts;
        opts.quick = quick;
        const auto results = acceptance::run(opts);
        return py::make_tuple(acceptance::all_passed(results), acceptance::render(results));
    }, py::arg("quick") = true);
}
