#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mg/game.hpp"
#include "mg/harness.hpp"
#include "mg/theory.hpp"
#include "mg/version.hpp"

namespace py = pybind11;
using namespace mg;

namespace {

GameConfig make_config(int n_agents, int s, int m, int d, const std::string& signal_mode,
                       const std::string& update_mode, const std::string& payoff_kind,
                       const std::string& pref_dist, double rho, long t_equil, long t_measure,
                       std::uint64_t seed) {
    GameConfig c;
    c.n_agents = n_agents;
    c.s = s;
    c.m = m;
    c.d = d;
    c.signal_mode = signal_mode_from_string(signal_mode);
    c.update_mode = update_mode_from_string(update_mode);
    c.payoff_kind = payoff_kind_from_string(payoff_kind);
    c.pref_dist = pref_dist_from_string(pref_dist);
    c.rho = rho;
    c.t_equil = t_equil;
    c.t_measure = t_measure;
    c.seed = seed;
    c.validate();
    return c;
}

} // namespace

PYBIND11_MODULE(_mgsim, mod) {
    mod.doc() = "Minority Game simulator: ensembles, observables and analytical maps";
    mod.attr("__version__") = build_version;

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

    py::class_<GameConfig>(mod, "GameConfig")
        .def(py::init(&make_config), py::kw_only(), py::arg("n_agents") = 255, py::arg("s") = 2,
             py::arg("m") = 1, py::arg("d") = 2, py::arg("signal_mode") = "endogenous",
             py::arg("update_mode") = "online", py::arg("payoff_kind") = "linear",
             py::arg("pref_dist") = "gaussian", py::arg("rho") = 0.0, py::arg("t_equil") = -1,
             py::arg("t_measure") = 2000, py::arg("seed") = 1)
        .def_readonly("n_agents", &GameConfig::n_agents)
        .def_readonly("s", &GameConfig::s)
        .def_readonly("m", &GameConfig::m)
        .def_readonly("rho", &GameConfig::rho)
        .def_readonly("t_measure", &GameConfig::t_measure)
        .def_readonly("seed", &GameConfig::seed)
        .def_property_readonly("d", &GameConfig::signal_dim)
        .def_property_readonly("alpha", &GameConfig::alpha)
        .def_property_readonly("t_equil", &GameConfig::equilibration_steps);

    py::class_<SampleStats>(mod, "SampleStats")
        .def_readonly("sigma2_over_n", &SampleStats::sigma2_over_n)
        .def_readonly("s_ranked", &SampleStats::s_ranked)
        .def_readonly("u1", &SampleStats::u1)
        .def_readonly("v1", &SampleStats::v1)
        .def_readonly("activity", &SampleStats::activity)
        .def_readonly("t_state", &SampleStats::t_state)
        .def_readonly("t_pop", &SampleStats::t_pop)
        .def_readonly("class_fractions", &SampleStats::class_fractions)
        .def_readonly("initial_a", &SampleStats::initial_a);

    py::class_<EnsembleSummary>(mod, "EnsembleSummary")
        .def_readonly("sigma2_over_n", &EnsembleSummary::sigma2_over_n)
        .def_readonly("sigma2_se", &EnsembleSummary::sigma2_se)
        .def_readonly("s_ranked", &EnsembleSummary::s_ranked)
        .def_readonly("s_ranked_se", &EnsembleSummary::s_ranked_se)
        .def_readonly("u1", &EnsembleSummary::u1)
        .def_readonly("v1", &EnsembleSummary::v1)
        .def_readonly("activity", &EnsembleSummary::activity)
        .def_readonly("activity_se", &EnsembleSummary::activity_se)
        .def_readonly("t_state", &EnsembleSummary::t_state)
        .def_readonly("t_pop", &EnsembleSummary::t_pop)
        .def_readonly("state_discard_fraction", &EnsembleSummary::state_discard_fraction)
        .def_readonly("class_fractions", &EnsembleSummary::class_fractions)
        .def_readonly("n_samples", &EnsembleSummary::n_samples);

    py::class_<EnsembleResult>(mod, "EnsembleResult")
        .def_readonly("summary", &EnsembleResult::summary)
        .def_readonly("samples", &EnsembleResult::samples);

    mod.def(
        "run_sample",
        [](const GameConfig& cfg, std::uint64_t sample_seed) { return run_sample(cfg, sample_seed); },
        py::arg("config"), py::arg("sample_seed"), py::call_guard<py::gil_scoped_release>());
    mod.def("run_ensemble", &run_ensemble, py::arg("config"), py::arg("n_samples"),
            py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

    mod.def("payoff_value",
            [](const std::string& kind, double x) { return payoff_value(payoff_kind_from_string(kind), x); },
            py::arg("kind"), py::arg("x"));
    mod.def("classify_step_vector",
            [](const std::vector<double>& abs_delta, double theta) {
                return classify_step_vector(abs_delta, theta);
            },
            py::arg("abs_delta"), py::arg("theta_large") = default_theta_large);

    py::class_<BifurcationPoint>(mod, "BifurcationPoint")
        .def_readonly("rho_c", &BifurcationPoint::rho_c)
        .def_readonly("onset_value", &BifurcationPoint::onset_value)
        .def_readonly("order", &BifurcationPoint::order);

    mod.def("solve_delta_a1", &solve_delta_a1, py::arg("rho"));
    mod.def("theory_sigma2", &theory_sigma2, py::arg("delta_a1"), py::arg("n_agents"));
    mod.def("stability_coefficient", &stability_coefficient, py::arg("rho"), py::arg("delta_a1"));
    mod.def("critical_rho_second", &critical_rho_second);
    mod.def("first_transition", &first_transition);
    mod.def("second_transition", &second_transition);
    mod.def("quadratic_basin", &quadratic_basin, py::arg("rho"));
    mod.def("gaussian_map_sigma2", &gaussian_map_sigma2, py::arg("rho"), py::arg("n_agents"),
            py::arg("t_equil"), py::arg("t_measure"), py::arg("n_realizations"), py::arg("seed"),
            py::call_guard<py::gil_scoped_release>());

    mod.def("figure_job",
            [](const std::string& name, const std::string& out_dir, int scale, int workers,
               std::uint64_t seed) { return figure_job(name, out_dir, scale, workers, seed).files; },
            py::arg("name"), py::arg("out_dir"), py::arg("scale") = 1, py::arg("workers") = 1,
            py::arg("seed") = 9001, py::call_guard<py::gil_scoped_release>());
    mod.def("figure_job_names", &figure_job_names);
}
