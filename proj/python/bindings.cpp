#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topamp/acceptance.hpp"
#include "topamp/disorder.hpp"
#include "topamp/floquet.hpp"
#include "topamp/reports.hpp"
#include "topamp/spectral.hpp"

namespace py = pybind11;
using namespace topamp;

namespace {

py::dict table_dict(const Table& t) {
    py::dict out;
    for (size_t c = 0; c < t.header.size(); ++c) {
        py::list col;
        for (const auto& row : t.rows) std::visit([&](const auto& v) { col.append(v); }, row[c]);
        out[py::str(t.header[c])] = col;
    }
    return out;
}

FiniteGreenOptions green_options(double max_condition) {
    FiniteGreenOptions o;
    o.max_condition = max_condition;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Topological amplifier chain: spectra, winding numbers, Green's functions and noise";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<GapClosingError>(m, "GapClosingError", PyExc_ArithmeticError);
    py::register_exception<DefectiveError>(m, "DefectiveError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<Boundary>(m, "Boundary").value("open", Boundary::open).value("periodic", Boundary::periodic);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double delta, double hop, double phi, double g_s, double g_c, double gamma, double pump,
                         int n_sites) {
                 ModelParams p;
                 p.delta = delta;
                 p.hop = hop;
                 p.phi = phi;
                 p.g_s = g_s;
                 p.g_c = g_c;
                 p.gamma = gamma;
                 p.pump = pump;
                 p.n_sites = n_sites;
                 p.validate();
                 return p;
             }),
             py::arg("delta") = 0.0, py::arg("hop") = 1.0, py::arg("phi") = kPi / 2, py::arg("g_s") = 1.0,
             py::arg("g_c") = 1.0, py::arg("gamma") = 4.0, py::arg("pump") = 0.0, py::arg("n_sites") = 12)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("hop", &ModelParams::hop)
        .def_readwrite("phi", &ModelParams::phi)
        .def_readwrite("g_s", &ModelParams::g_s)
        .def_readwrite("g_c", &ModelParams::g_c)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("pump", &ModelParams::pump)
        .def_readwrite("n_sites", &ModelParams::n_sites)
        .def_readonly("energy_unit", &ModelParams::energy_unit)
        .def("normalized", &ModelParams::normalized)
        .def("validate", &ModelParams::validate)
        .def("set", [](ModelParams& p, const std::string& name, double v) { set_parameter(p, name, v); })
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(delta=" + format_number(p.delta) + ", hop=" + format_number(p.hop) +
                   ", phi=" + format_number(p.phi) + ", g_s=" + format_number(p.g_s) + ", g_c=" +
                   format_number(p.g_c) + ", gamma=" + format_number(p.gamma) + ", pump=" + format_number(p.pump) +
                   ", n_sites=" + std::to_string(p.n_sites) + ")";
        });

    m.def("canonical_params", &canonical_params);
    m.def("double_hatano_nelson_params", &double_hatano_nelson_params);

    m.def(
        "dynamical_matrix",
        [](const ModelParams& p, Boundary b, std::optional<std::vector<double>> onsite) {
            std::optional<DisorderOffsets> d;
            if (onsite) {
                d.emplace();
                d->offsets = *onsite;
            }
            return build_dynamical_matrix(p, b, d).entries;
        },
        py::arg("params"), py::arg("boundary") = Boundary::open, py::arg("onsite") = py::none());
    m.def("pump_matrix", &build_pump_matrix, py::arg("params"), py::arg("boundary") = Boundary::open);
    m.def(
        "bloch_matrix", [](const ModelParams& p, double k) { return CMat(bloch_matrix(p, k).matrix); },
        py::arg("params"), py::arg("k"));

    m.def(
        "singular_values",
        [](const ModelParams& p, double omega, Boundary b) {
            return singular_spectrum(build_dynamical_matrix(p, b), omega).values;
        },
        py::arg("params"), py::arg("omega") = 0.0, py::arg("boundary") = Boundary::open);
    m.def(
        "zero_mode_count",
        [](const ModelParams& p, double omega, double threshold) {
            const auto c = zero_mode_census(singular_spectrum(build_dynamical_matrix(p), omega), threshold);
            return py::make_tuple(c.count, c.gap);
        },
        py::arg("params"), py::arg("omega") = 0.0, py::arg("threshold") = kZeroModeThreshold);
    m.def(
        "stability",
        [](const ModelParams& p, Boundary b) {
            const auto r = stability_report(build_dynamical_matrix(p, b));
            return py::make_tuple(r.stable, r.max_im_eigenvalue);
        },
        py::arg("params"), py::arg("boundary") = Boundary::open);

    m.def(
        "winding",
        [](const ModelParams& p, double omega, int n_k) { return winding_trace(p, omega, n_k).value; },
        py::arg("params"), py::arg("omega") = 0.0, py::arg("n_k") = kDefaultNk);
    m.def(
        "band_windings",
        [](const ModelParams& p, double omega, int n_k) {
            const auto path = band_path(p, omega, n_k);
            return py::make_tuple(winding_band(path, omega, Branch::plus), winding_band(path, omega, Branch::minus));
        },
        py::arg("params"), py::arg("omega") = 0.0, py::arg("n_k") = kDefaultNk);
    m.def(
        "phase_diagram",
        [](const ModelParams& p, const std::string& sx, const std::string& sy, int n_k, double omega, int threads) {
            return table_dict(
                phase_diagram_table(phase_diagram(p, SweepSpec::parse(sx), SweepSpec::parse(sy), n_k, omega, threads)));
        },
        py::arg("params"), py::arg("sweep_x"), py::arg("sweep_y"), py::arg("n_k") = kDefaultNk,
        py::arg("omega") = 0.0, py::arg("threads") = 0);

    m.def(
        "green",
        [](const ModelParams& p, double omega, double max_condition) {
            return finite_green(build_dynamical_matrix(p), omega, green_options(max_condition)).matrix;
        },
        py::arg("params"), py::arg("omega"), py::arg("max_condition") = 1e12);
    m.def(
        "surface_green", [](const ModelParams& p, double omega) { return CMat(surface_green(p, omega).G00); },
        py::arg("params"), py::arg("omega"));
    m.def(
        "coherence_lengths",
        [](const ModelParams& p, double omega) {
            const auto c = coherence_lengths(p, omega);
            return py::make_tuple(c.zeta_plus, c.zeta_minus);
        },
        py::arg("params"), py::arg("omega"));

    m.def(
        "gain",
        [](const ModelParams& p, int site, double omega, double max_condition) {
            return gain(finite_green(build_dynamical_matrix(p), omega, green_options(max_condition)), p, site);
        },
        py::arg("params"), py::arg("site"), py::arg("omega") = 0.0, py::arg("max_condition") = 1e12);
    m.def("gain_closed_form", &gain_closed_form, py::arg("params"), py::arg("site"), py::arg("omega"));
    m.def(
        "amplifier",
        [](const ModelParams& p, const std::vector<int>& sites, const std::vector<double>& omegas, int threads,
           double max_condition) {
            return table_dict(amplifier_table(p, sites, omegas, threads, green_options(max_condition)));
        },
        py::arg("params"), py::arg("sites"), py::arg("omegas"), py::arg("threads") = 0,
        py::arg("max_condition") = 1e12);
    m.def(
        "squeezing",
        [](const ModelParams& p, const std::vector<int>& sites, const std::vector<double>& omegas, double theta,
           int threads) { return table_dict(squeezing_table(squeezing_trajectory(p, sites, omegas, theta, threads), omegas)); },
        py::arg("params"), py::arg("sites"), py::arg("omegas"), py::arg("theta") = kPi / 4, py::arg("threads") = 0);

    m.def(
        "ensemble",
        [](const ModelParams& p, double strength, int realizations, std::uint64_t seed, double omega, int threads) {
            EnsembleSpec s;
            s.base_params = p;
            s.strength = strength;
            s.n_realizations = realizations;
            s.seed = seed;
            s.omega = omega;
            const auto e = ensemble_spectrum(s, threads);
            return py::make_tuple(e.mean_values, table_dict(ensemble_table(s, e)));
        },
        py::arg("params"), py::arg("strength"), py::arg("realizations") = 100, py::arg("seed") = 0,
        py::arg("omega") = 0.0, py::arg("threads") = 0);

    m.def("bessel_j", &bessel_j, py::arg("n"), py::arg("x"));
    m.def("f_function", &f_function, py::arg("eta"), py::arg("delta_phi"), py::arg("n_max") = 40);
    auto map_dict = [](const DriveMap& d) {
        py::dict o;
        o["hop"] = d.hop;
        o["phi"] = d.phi;
        o["g_s"] = d.g_s;
        o["g_c"] = d.g_c;
        o["raw_hop"] = d.raw_hop;
        o["raw_phi"] = d.raw_phi;
        o["warnings"] = d.warnings;
        return o;
    };
    m.def(
        "local_drive_map",
        [map_dict](double j_c, double eta, double delta_phi, int n_max) {
            LocalDriveSpec s;
            s.j_c = j_c;
            s.eta = eta;
            s.delta_phi = delta_phi;
            s.n_max = n_max;
            return map_dict(local_drive_map(s));
        },
        py::arg("j_c"), py::arg("eta"), py::arg("delta_phi"), py::arg("n_max") = 40);
    m.def(
        "coupling_drive_map",
        [map_dict](double a0, double a1, double a2, double a3, double phi_d) {
            CouplingDriveSpec s;
            s.a0 = a0;
            s.a1 = a1;
            s.a2 = a2;
            s.a3 = a3;
            s.phi_d = phi_d;
            return map_dict(coupling_drive_map(s));
        },
        py::arg("a0") = 0.0, py::arg("a1") = 0.0, py::arg("a2") = 0.0, py::arg("a3") = 0.0, py::arg("phi_d") = 0.0);

    m.def(
        "verify",
        [](int id) {
            CriterionResult r;
            {
                py::gil_scoped_release release;
                r = run_criterion(id);
            }
            return py::make_tuple(r.passed, format_result(r));
        },
        py::arg("criterion"));
}
