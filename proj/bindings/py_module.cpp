#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bassdp/bass.hpp"
#include "bassdp/det_optimal.hpp"
#include "bassdp/experiments.hpp"
#include "bassdp/policies.hpp"
#include "bassdp/simulate.hpp"

namespace py = pybind11;
using namespace bassdp;

PYBIND11_MODULE(_bassdp, mod) {
    mod.doc() = "Bass-market dynamic pricing: fluid analytics, stochastic simulator, "
                "epoch learner, experiment harnesses";

    py::class_<MarketParams>(mod, "MarketParams")
        .def(py::init([](std::int64_t m, double alpha, double beta, double phi) {
                 MarketParams p{m, alpha, beta, phi};
                 p.validate();
                 return p;
             }),
             py::arg("m"), py::arg("alpha"), py::arg("beta"), py::arg("phi") = 1.0)
        .def_readonly("m", &MarketParams::m)
        .def_readonly("alpha", &MarketParams::alpha)
        .def_readonly("beta", &MarketParams::beta)
        .def_readonly("phi", &MarketParams::phi);

    py::class_<SimTrace>(mod, "SimTrace")
        .def_readonly("arrival_times", &SimTrace::arrival_times)
        .def_readonly("prices", &SimTrace::prices)
        .def_readonly("revenue", &SimTrace::revenue)
        .def_readonly("seed", &SimTrace::seed)
        .def("adopters", &SimTrace::adopters);

    py::class_<FluidSegment>(mod, "FluidSegment")
        .def_readonly("price", &FluidSegment::price)
        .def_readonly("x_start", &FluidSegment::x_start)
        .def_readonly("x_end", &FluidSegment::x_end)
        .def_readonly("duration", &FluidSegment::duration);

    py::class_<FluidTrajectory>(mod, "FluidTrajectory")
        .def_readonly("segments", &FluidTrajectory::segments)
        .def_readonly("total_time", &FluidTrajectory::total_time)
        .def_readonly("total_revenue", &FluidTrajectory::total_revenue)
        .def("x_end", &FluidTrajectory::x_end);

    mod.def("arrival_rate", &arrival_rate, py::arg("params"), py::arg("price"), py::arg("x"));
    mod.def("floor_count", &floor_count, py::arg("r"));
    mod.def("final_adoption", &final_adoption, py::arg("params"), py::arg("horizon"),
            py::arg("x0") = 0.0);
    mod.def("optimal_price_curve", &optimal_price_curve, py::arg("params"), py::arg("horizon"),
            py::arg("x"));
    mod.def("optimal_policy_price", &optimal_policy_price, py::arg("params"), py::arg("x"),
            py::arg("t_remaining"));
    mod.def("det_value", &det_value, py::arg("params"), py::arg("x"), py::arg("horizon"));
    mod.def("price_upper_bound", &price_upper_bound, py::arg("params"), py::arg("horizon"));
    mod.def("segment_time", &segment_time, py::arg("params"), py::arg("price"), py::arg("x1"),
            py::arg("x2"));
    mod.def("disadvantage", &disadvantage, py::arg("params"), py::arg("x"),
            py::arg("t_remaining"), py::arg("price"));
    mod.def(
        "fluid_simulate",
        [](const MarketParams& params, double horizon,
           const std::vector<std::pair<double, double>>& schedule) {
            std::vector<PricePoint> pts;
            pts.reserve(schedule.size());
            for (const auto& [x, p] : schedule) pts.push_back({x, p});
            return fluid_simulate(params, horizon, pts);
        },
        py::arg("params"), py::arg("horizon"), py::arg("schedule"));
    mod.def("kl_exponential", &kl_exponential, py::arg("rate1"), py::arg("rate0"));
    mod.def("default_horizon", &default_horizon, py::arg("alpha"), py::arg("beta"));
    mod.def(
        "stoch_value_dp",
        [](const MarketParams& params, double horizon, int time_steps, int price_points,
           double price_max) {
            const auto grid = uniform_price_grid(price_max, price_points);
            return stoch_value_dp(params, horizon, time_steps, grid);
        },
        py::arg("params"), py::arg("horizon"), py::arg("time_steps") = 1000,
        py::arg("price_points") = 100, py::arg("price_max") = 3.0);
    mod.def(
        "simulate",
        [](const MarketParams& params, double horizon, const std::string& policy,
           std::uint64_t seed, double delta, double p_explore, double fixed_price) {
            PolicyConfig config{params.m, horizon, params.phi, delta, p_explore};
            auto p = make_policy(policy_kind_from_string(policy), config, params, fixed_price);
            return simulate(params, horizon, *p, seed);
        },
        py::arg("params"), py::arg("horizon"), py::arg("policy"), py::arg("seed"),
        py::arg("delta") = 0.1, py::arg("p_explore") = 0.0, py::arg("fixed_price") = 0.0);
    mod.def("pseudo_regret", &pseudo_regret, py::arg("trace"), py::arg("params"),
            py::arg("horizon"));
}
