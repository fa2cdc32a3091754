#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pfl/config.hpp"
#include "pfl/error.hpp"
#include "pfl/gem.hpp"
#include "pfl/hydro.hpp"
#include "pfl/scenarios.hpp"
#include "pfl/solver.hpp"
#include "pfl/version.hpp"

namespace py = pybind11;
using ComplexArray = py::array_t<pfl::Complex, py::array::c_style | py::array::forcecast>;

namespace {

pfl::Field2D to_field(const ComplexArray& psi, double dx, double dy) {
    if (psi.ndim() != 2) throw pfl::InvalidArgument("field must be a 2-D array indexed [y, x]");
    const auto g = pfl::make_grid(static_cast<std::size_t>(psi.shape(1)), static_cast<std::size_t>(psi.shape(0)), dx, dy);
    return pfl::Field2D(g, std::vector<pfl::Complex>(psi.data(), psi.data() + psi.size()), pfl::UnitTag::dimensionless);
}

ComplexArray to_array(const pfl::Field2D& f) {
    ComplexArray out({f.grid().ny(), f.grid().nx()});
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_pfl, m) {
    m.doc() = "Paraxial fluid-of-light simulator and gradient echo memory model";
    m.attr("__version__") = pfl::kVersion;

    py::register_exception<pfl::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<pfl::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<pfl::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<pfl::IoError>(m, "IoError", PyExc_OSError);

    m.def("scenario_names", &pfl::scenario_names);
    m.def(
        "validate_config", [](const std::string& text) { return pfl::serialize_config(pfl::parse_config(text)); },
        py::arg("text"), "Parse and validate INI text; returns the canonical serialization.");
    m.def(
        "run_scenario",
        [](const std::string& text, const std::filesystem::path& out_dir, unsigned jobs) {
            const auto cfg = pfl::parse_config(text);
            pfl::ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = pfl::run_scenario(cfg, {out_dir, jobs});
            }
            std::vector<std::string> files;
            for (const auto& f : r.files) files.push_back(f.generic_string());
            py::dict d;
            d["out_dir"] = r.out_dir;
            d["files"] = files;
            d["manifest"] = r.manifest;
            d["summary"] = r.summary;
            return d;
        },
        py::arg("config_text"), py::arg("out_dir"), py::arg("jobs") = 1u,
        "Run the scenario described by INI text and write its outputs to out_dir.");
    m.def("sha256_file", &pfl::sha256_file, py::arg("path"));

    m.def(
        "propagate",
        [](const ComplexArray& psi, double dx, double dy, double tau, std::size_t steps) {
            const auto f = to_field(psi, dx, dy);
            pfl::PropagationRecord rec;
            {
                py::gil_scoped_release release;
                rec = pfl::propagate(f, pfl::dimensionless_medium(tau), pfl::StepPlan::for_length(tau, steps));
            }
            std::vector<double> power;
            for (const auto& p : rec.power_trace) power.push_back(p.power);
            return py::make_tuple(to_array(rec.final_field), power);
        },
        py::arg("psi"), py::arg("dx"), py::arg("dy"), py::arg("tau"), py::arg("steps"),
        "Propagate a dimensionless field indexed [y, x] through a defocusing medium to tau.\n"
        "Returns the final field and the power after each step.");
    m.def(
        "detect_vortices",
        [](const ComplexArray& psi, double dx, double dy, double floor) {
            std::vector<std::tuple<double, double, int>> out;
            for (const auto& v : pfl::detect_vortices(to_field(psi, dx, dy), floor).vortices)
                out.emplace_back(v.x, v.y, v.charge);
            return out;
        },
        py::arg("psi"), py::arg("dx") = 1.0, py::arg("dy") = 1.0, py::arg("density_floor") = pfl::kDefaultDensityFloor,
        "Plaquette vortices as (x, y, charge) with grid-centred coordinates.");

    m.def("gem_efficiency_theory", &pfl::gem_efficiency_theory, py::arg("g"), py::arg("density"), py::arg("eta"));
    m.def(
        "gem_efficiency_sweep",
        [](const std::vector<double>& ratios, double flip_time, double pulse_center, double pulse_width) {
            pfl::GemConfig c;
            c.flip_times = {flip_time};
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : pfl::gem_efficiency_sweep(c, pfl::Pulse{pulse_center, pulse_width, 1.0, "A"}, ratios))
                out.emplace_back(r.ratio, r.sigma_theory, r.sigma_sim);
            return out;
        },
        py::arg("ratios"), py::arg("flip_time") = 4.0, py::arg("pulse_center") = 2.0, py::arg("pulse_width") = 0.2,
        "Rows of (ratio, sigma_theory, sigma_sim) with default memory parameters.");
}
