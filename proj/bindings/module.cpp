#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "phlb/dist_spec.hpp"
#include "phlb/fixed_point.hpp"
#include "phlb/mean_field.hpp"
#include "phlb/moment_fit.hpp"
#include "phlb/simulation.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "randomized load balancing with phase-type service";

    py::register_exception<phlb::UnstableModel>(m, "UnstableModel", PyExc_ValueError);
    py::register_exception<phlb::NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
    py::register_exception<phlb::FitError>(m, "FitError", PyExc_ValueError);

    py::class_<phlb::PhaseType>(m, "PhaseType")
        .def(py::init<phlb::RowVec, phlb::Mat>(), py::arg("alpha"), py::arg("T"))
        .def_property_readonly("order", &phlb::PhaseType::order)
        .def_property_readonly("alpha", &phlb::PhaseType::alpha)
        .def_property_readonly("T", &phlb::PhaseType::T)
        .def_property_readonly("exit_rates", &phlb::PhaseType::exit_rates)
        .def_property_readonly("omega", &phlb::PhaseType::stationary_phase_vector)
        .def("mean", &phlb::PhaseType::mean)
        .def("moment", &phlb::PhaseType::moment, py::arg("n"))
        .def("service_rate", &phlb::PhaseType::service_rate)
        .def("theta", &phlb::PhaseType::theta, py::arg("d"))
        .def("residual", &phlb::PhaseType::residual)
        .def("to_json", [](const phlb::PhaseType& ph) { return phlb::to_json(ph).dump(); })
        .def("__repr__", [](const phlb::PhaseType& ph) {
            return "PhaseType(order=" + std::to_string(ph.order()) + ")";
        });

    m.def("erlang", &phlb::erlang, py::arg("stages"), py::arg("rate"));
    m.def("hyper_exponential", &phlb::hyper_exponential, py::arg("weights"), py::arg("rates"));
    m.def("exponential", &phlb::exponential, py::arg("rate"));
    m.def("coxian2", &phlb::coxian2, py::arg("eta"), py::arg("xi1"), py::arg("xi2"));
    m.def("parse_dist", &phlb::parse_dist, py::arg("spec"));
    m.def("dist_from_json", [](const std::string& text) {
        return phlb::ph_from_json(nlohmann::json::parse(text));
    });

    py::class_<phlb::MomentTriple>(m, "MomentTriple")
        .def(py::init<double, double, double>(), py::arg("m1"), py::arg("m2"), py::arg("m3"))
        .def_readwrite("m1", &phlb::MomentTriple::m1)
        .def_readwrite("m2", &phlb::MomentTriple::m2)
        .def_readwrite("m3", &phlb::MomentTriple::m3);

    py::class_<phlb::Ph2Fit>(m, "Ph2Fit")
        .def_readonly("used", &phlb::Ph2Fit::used)
        .def_property_readonly("flags",
                               [](const phlb::Ph2Fit& f) {
                                   std::vector<std::string> out;
                                   for (auto fl : f.flags) out.push_back(phlb::to_string(fl));
                                   return out;
                               })
        .def_readonly("eta", &phlb::Ph2Fit::eta)
        .def_readonly("xi1", &phlb::Ph2Fit::xi1)
        .def_readonly("xi2", &phlb::Ph2Fit::xi2)
        .def_readonly("dist", &phlb::Ph2Fit::dist);

    m.def("fit_moments", &phlb::fit_moments, py::arg("moments"));
    m.def("verify_fit", &phlb::verify_fit, py::arg("fit"));

    py::class_<phlb::ModelParams>(m, "ModelParams")
        .def(py::init<phlb::PhaseType, double, int>(), py::arg("ph"), py::arg("lam"),
             py::arg("d"))
        .def_readonly("ph", &phlb::ModelParams::ph)
        .def_readonly("lam", &phlb::ModelParams::lambda)
        .def_readonly("d", &phlb::ModelParams::d)
        .def("mu", &phlb::ModelParams::mu)
        .def("rho", &phlb::ModelParams::rho);

    py::class_<phlb::FixedPointTable>(m, "FixedPointTable")
        .def_readonly("levels", &phlb::FixedPointTable::levels)
        .def_readonly("omega", &phlb::FixedPointTable::omega)
        .def_readonly("rho", &phlb::FixedPointTable::rho)
        .def_readonly("theta", &phlb::FixedPointTable::theta)
        .def_readonly("mu", &phlb::FixedPointTable::mu)
        .def("depth", &phlb::FixedPointTable::depth)
        .def("tail", &phlb::FixedPointTable::tail, py::arg("k"));

    m.def("fixed_point_vector", &phlb::fixed_point_vector, py::arg("params"), py::arg("k"));
    m.def(
        "fixed_point_table",
        [](const phlb::ModelParams& params, int kmax, double tail_eps) {
            phlb::TableOptions opts;
            opts.max_levels = kmax;
            opts.tail_eps = tail_eps;
            return phlb::fixed_point_table(params, opts);
        },
        py::arg("params"), py::arg("kmax") = 0, py::arg("tail_eps") = 1e-16);
    m.def("expected_sojourn", &phlb::expected_sojourn, py::arg("params"));

    py::class_<phlb::BalanceReport>(m, "BalanceReport")
        .def_readonly("level0", &phlb::BalanceReport::level0)
        .def_readonly("scalar", &phlb::BalanceReport::scalar)
        .def_readonly("vec", &phlb::BalanceReport::vec)
        .def("max_scalar", &phlb::BalanceReport::max_scalar)
        .def("max_vector", &phlb::BalanceReport::max_vector);
    m.def("balance_residuals", &phlb::balance_residuals, py::arg("params"), py::arg("kmax"));

    py::class_<phlb::MeanFieldState>(m, "MeanFieldState")
        .def_readwrite("t", &phlb::MeanFieldState::t)
        .def_readwrite("levels", &phlb::MeanFieldState::levels)
        .def("depth", &phlb::MeanFieldState::depth)
        .def("order", &phlb::MeanFieldState::order)
        .def("tail", &phlb::MeanFieldState::tail, py::arg("k"));

    m.def("empty_state", &phlb::empty_state, py::arg("order"), py::arg("depth"));
    m.def("state_from_table", &phlb::state_from_table, py::arg("table"), py::arg("depth") = 0);
    m.def("derivative", &phlb::derivative, py::arg("state"), py::arg("params"));

    py::class_<phlb::Trajectory>(m, "Trajectory")
        .def_readonly("samples", &phlb::Trajectory::samples)
        .def_readonly("step", &phlb::Trajectory::step)
        .def_readonly("halvings", &phlb::Trajectory::halvings)
        .def_readonly("halving_diff", &phlb::Trajectory::halving_diff);

    m.def(
        "integrate",
        [](const phlb::MeanFieldState& init, const phlb::ModelParams& params, double horizon,
           double step_scale, int samples, int depth, bool verify) {
            phlb::OdeOptions opts;
            opts.step_scale = step_scale;
            opts.samples = samples;
            opts.depth = depth;
            opts.verify_step = verify;
            return phlb::integrate(init, params, horizon, opts);
        },
        py::arg("init"), py::arg("params"), py::arg("horizon"), py::arg("step_scale") = 0.01,
        py::arg("samples") = 512, py::arg("depth") = 0, py::arg("verify") = true);
    m.def(
        "stationary_solve",
        [](const phlb::ModelParams& params, double tol, int depth) {
            phlb::OdeOptions opts;
            opts.depth = depth;
            return phlb::stationary_solve(params, tol, opts);
        },
        py::arg("params"), py::arg("tol") = 1e-10, py::arg("depth") = 0);
    m.def("lyapunov_distance", &phlb::lyapunov_distance, py::arg("state"), py::arg("table"));
    m.def("ordering_violation_count", &phlb::ordering_violation_count, py::arg("state"),
          py::arg("table"));
    m.def("ordering_holds", &phlb::ordering_holds, py::arg("lo"), py::arg("hi"));

    py::class_<phlb::SimConfig>(m, "SimConfig")
        .def(py::init<phlb::PhaseType>(), py::arg("ph"))
        .def_readwrite("n", &phlb::SimConfig::n)
        .def_readwrite("d", &phlb::SimConfig::d)
        .def_readwrite("lam", &phlb::SimConfig::lambda)
        .def_readwrite("horizon", &phlb::SimConfig::horizon)
        .def_readwrite("warmup", &phlb::SimConfig::warmup)
        .def_readwrite("seed", &phlb::SimConfig::seed)
        .def_readwrite("replications", &phlb::SimConfig::replications)
        .def_readwrite("tail_depth", &phlb::SimConfig::tail_depth);

    py::class_<phlb::ReplicationStats>(m, "ReplicationStats")
        .def_readonly("arrivals", &phlb::ReplicationStats::arrivals)
        .def_readonly("completed", &phlb::ReplicationStats::completed)
        .def_readonly("mean_response", &phlb::ReplicationStats::mean_response)
        .def_readonly("mean_jobs_per_server", &phlb::ReplicationStats::mean_jobs_per_server)
        .def_readonly("tail_fractions", &phlb::ReplicationStats::tail_fractions)
        .def_readonly("little_ratio", &phlb::ReplicationStats::little_ratio);

    py::class_<phlb::SimStats>(m, "SimStats")
        .def_readonly("reps", &phlb::SimStats::reps)
        .def_readonly("mean_response", &phlb::SimStats::mean_response)
        .def_readonly("ci_half", &phlb::SimStats::ci_half)
        .def_readonly("ci_infinite", &phlb::SimStats::ci_infinite)
        .def_readonly("little_ratio", &phlb::SimStats::little_ratio)
        .def_readonly("tail_fractions", &phlb::SimStats::tail_fractions)
        .def_readonly("completed", &phlb::SimStats::completed)
        .def_readonly("overloaded", &phlb::SimStats::overloaded);

    m.def("simulate", &phlb::simulate, py::arg("cfg"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_replication", &phlb::run, py::arg("cfg"), py::arg("replication_index") = 0,
          py::call_guard<py::gil_scoped_release>());
}
