#include "strongcomp/acceptance.hpp"
#include "strongcomp/analysis.hpp"
#include "strongcomp/grid.hpp"
#include "strongcomp/io.hpp"
#include "strongcomp/model.hpp"
#include "strongcomp/scenarios.hpp"
#include "strongcomp/solver.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace strongcomp;

namespace {

py::array_t<double> as_array(const ScalarField& f) {
    py::array_t<double> out(f.size());
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

void assign(ScalarField& f, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != f.size())
        throw std::invalid_argument("array length does not match the grid node count");
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
}

}  // namespace

PYBIND11_MODULE(_strongcomp, m) {
    m.doc() = "Strong-competition reaction-diffusion solver and diagnostics";

    py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError);
    py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_RuntimeError);
    py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_static("identical", &ModelParams::identical, py::arg("n"), py::arg("D"), py::arg("lam"),
                    py::arg("mu"), py::arg("d"), py::arg("omega"), py::arg("k"), py::arg("a_off"),
                    py::arg("beta"), py::arg("delta"))
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("D", &ModelParams::D)
        .def_readwrite("lam", &ModelParams::lambda)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("d", &ModelParams::d)
        .def_readwrite("omega", &ModelParams::omega)
        .def_readwrite("k", &ModelParams::k)
        .def_readwrite("a", &ModelParams::a)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("delta", &ModelParams::delta)
        .def("surplus", &ModelParams::surplus);

    m.def("validate_uniform", [](const ModelParams& p) {
        const auto a = validate_uniform(p);
        std::vector<std::string> msgs;
        for (const auto& v : a.violations) msgs.push_back(v.message);
        return py::make_tuple(a.admissible, msgs);
    });
    m.def("constant_single_species_state", [](const ModelParams& p, std::size_t i) -> py::object {
        const auto s = constant_single_species_state(p, i);
        if (!s) return py::none();
        return py::make_tuple(s->u, s->w);
    });

    py::class_<Grid>(m, "Grid")
        .def_static("interval", &Grid::interval)
        .def_static("rectangle", &Grid::rectangle)
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("measure", &Grid::measure)
        .def("coords", [](const Grid& g, int axis) {
            py::array_t<double> out(g.size());
            for (std::size_t q = 0; q < g.size(); ++q) out.mutable_at(q) = g.coord(q, axis);
            return out;
        })
        .def("__eq__", &Grid::operator==);

    py::class_<FieldSet>(m, "FieldSet")
        .def(py::init<const Grid&, std::size_t>())
        .def_property_readonly("n", &FieldSet::n)
        .def_property_readonly("grid", &FieldSet::grid)
        .def_property("u", [](const FieldSet& s) { return as_array(s.u); },
                      [](FieldSet& s, py::array_t<double> a) { assign(s.u, a); })
        .def("w", [](const FieldSet& s, std::size_t i) { return as_array(s.w.at(i)); })
        .def("set_w", [](FieldSet& s, std::size_t i, py::array_t<double> a) { assign(s.w.at(i), a); })
        .def("sup", &FieldSet::sup)
        .def("min", &FieldSet::min);

    py::class_<SolveSettings>(m, "SolveSettings")
        .def(py::init<>())
        .def_readwrite("tau", &SolveSettings::tau)
        .def_readwrite("tol_residual", &SolveSettings::tol_residual)
        .def_readwrite("tol_update", &SolveSettings::tol_update)
        .def_readwrite("max_steps", &SolveSettings::max_steps)
        .def_readwrite("newton", &SolveSettings::newton);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("state", &SolveReport::state)
        .def_readonly("residual_sup", &SolveReport::residual_sup)
        .def_readonly("steps_taken", &SolveReport::steps_taken)
        .def_readonly("converged", &SolveReport::converged);

    py::class_<ContinuationTrace>(m, "ContinuationTrace")
        .def_readonly("betas", &ContinuationTrace::betas)
        .def_readonly("reports", &ContinuationTrace::reports);

    m.def("imex_step", [](const FieldSet& s, const ModelParams& p, double tau) { return imex_step(s, p, tau); });
    m.def("residual_norm", &residual_norm);
    m.def("march_to_steady",
          [](const FieldSet& s, const ModelParams& p, const SolveSettings& st) { return march_to_steady(s, p, st); },
          py::arg("initial"), py::arg("params"), py::arg("settings") = SolveSettings{});
    m.def("newton_refine", &newton_refine);
    m.def("continue_in_beta",
          [](const FieldSet& s, const ModelParams& p, const std::vector<double>& betas, const SolveSettings& st) {
              return continue_in_beta(s, p, betas, st);
          });

    m.def("lambda1_of_support", [](const Grid& g, py::array_t<bool> mask) {
        SupportMask sm(g);
        if (static_cast<std::size_t>(mask.size()) != g.size())
            throw std::invalid_argument("mask length does not match the grid node count");
        for (std::size_t q = 0; q < g.size(); ++q) sm.set(q, mask.at(q));
        return lambda1_restricted(sm, g);
    });

    m.def("check_linf_bounds", [](const FieldSet& s, const ModelParams& p) {
        return to_structured(check_linf_bounds(s, p)).dump();
    });
    m.def("overlaps", [](const FieldSet& s, const ModelParams& p) {
        const auto r = segregation_report(s, p);
        py::array_t<double> out({r.n, r.n});
        std::copy(r.overlap.begin(), r.overlap.end(), out.mutable_data());
        return out;
    });
    m.def("holder_seminorm", [](const FieldSet& s, std::size_t i, double alpha) {
        return holder_seminorm(s.w.at(i), alpha);
    });
    m.def("survivor_count", [](const FieldSet& s, const ModelParams& p, double threshold) {
        return survivor_count(s, p, threshold).count;
    });
    m.def("default_threshold", &default_threshold);

    m.def("load_config", [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
        const auto c = load_config(path, overrides);
        return py::make_tuple(c.model, c.grid, c.solve, c.betas, build_initial_state(c, c.initial.seeds.front()));
    }, py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
    m.def("write_snapshot", [](const FieldSet& s, const ModelParams& p, const std::filesystem::path& path) {
        write_snapshot(s, SnapshotMeta{p, p.beta}, path);
    });
    m.def("read_snapshot", [](const std::filesystem::path& path) {
        auto snap = read_snapshot(path);
        return py::make_tuple(snap.state, snap.meta.params);
    });

    m.def("scenario_a", [] { return py::make_tuple(scenarios::a_params(), scenarios::a_initial()); });
    m.def("scenario_b", [](double beta) { return py::make_tuple(scenarios::b_params(beta), scenarios::b_initial()); },
          py::arg("beta") = 0.0);

    m.def("run_acceptance", [] {
        std::vector<py::tuple> out;
        for (const auto& r : run_acceptance()) out.push_back(py::make_tuple(r.id, r.name, r.pass, r.detail));
        return out;
    });
}
