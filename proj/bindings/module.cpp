#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsa/inference.hpp"
#include "dsa/likelihood.hpp"
#include "dsa/model.hpp"
#include "dsa/simulate.hpp"

namespace py = pybind11;
using namespace dsa;

PYBIND11_MODULE(_core, m) {
  m.doc() = "epidemic survival-dynamics core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_ArithmeticError);

  py::enum_<Variant>(m, "Variant")
      .value("StandardSIR", Variant::StandardSIR)
      .value("GammaFrailty", Variant::GammaFrailty)
      .value("PoissonNetwork", Variant::PoissonNetwork);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](Variant variant, double beta, double gamma, double rho, double nu) {
             ModelParams p{variant, beta, gamma, rho, nu};
             p.validate();
             return p;
           }),
           py::arg("variant") = Variant::StandardSIR, py::arg("beta") = 1.0,
           py::arg("gamma") = 1.0, py::arg("rho") = 0.05, py::arg("nu") = 0.0)
      .def_readwrite("variant", &ModelParams::variant)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("rho", &ModelParams::rho)
      .def_readwrite("nu", &ModelParams::nu)
      .def("r0", &ModelParams::r0)
      .def("__repr__", [](const ModelParams& p) {
        return std::string("ModelParams(") + variant_name(p.variant) +
               ", beta=" + std::to_string(p.beta) + ", gamma=" + std::to_string(p.gamma) +
               ", rho=" + std::to_string(p.rho) + ", nu=" + std::to_string(p.nu) + ")";
      });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double t_end, int n_steps) {
             GridSpec g{t_end, n_steps};
             g.validate();
             return g;
           }),
           py::arg("t_end"), py::arg("n_steps"))
      .def_static("dense", &GridSpec::dense, py::arg("t_end"))
      .def_readonly("t_end", &GridSpec::t_end)
      .def_readonly("n_steps", &GridSpec::n_steps);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("s", &Trajectory::s)
      .def_readonly("iota", &Trajectory::iota)
      .def_readonly("r", &Trajectory::r)
      .def_property_readonly("t_end", &Trajectory::t_end)
      .def("survival", &eval_survival, py::arg("t"))
      .def("infected", &eval_infected, py::arg("t"))
      .def("removed", &eval_removed, py::arg("t"))
      .def("invert_survival", &invert_survival, py::arg("s_target"));

  m.def("solve", &solve, py::arg("params"), py::arg("grid"));
  m.def(
      "solve_tau", [](double r0, double rho) { return solve_tau(r0, rho).tau; }, py::arg("r0"),
      py::arg("rho"));

  py::class_<InfectiousPeriod>(m, "InfectiousPeriod")
      .def_readonly("duration", &InfectiousPeriod::duration)
      .def_readonly("censored", &InfectiousPeriod::censored);

  py::class_<EventRecord>(m, "EventRecord")
      .def_readonly("n", &EventRecord::n)
      .def_readonly("m", &EventRecord::m)
      .def_readonly("horizon", &EventRecord::horizon)
      .def_readonly("infection_times", &EventRecord::infection_times)
      .def_readonly("periods", &EventRecord::periods)
      .def_readonly("initial_recoveries", &EventRecord::initial_recoveries)
      .def_property_readonly("total_infected", &EventRecord::total_infected);

  py::class_<CountData>(m, "CountData")
      .def(py::init([](std::vector<double> schedule, std::vector<long long> counts,
                       std::optional<long long> n, std::optional<long long> m_) {
             CountData d{std::move(schedule), std::move(counts), n, m_};
             d.validate();
             return d;
           }),
           py::arg("schedule"), py::arg("counts"), py::arg("n") = std::nullopt,
           py::arg("m") = std::nullopt)
      .def_readwrite("schedule", &CountData::schedule)
      .def_readwrite("counts", &CountData::counts)
      .def_readwrite("n", &CountData::n)
      .def_readwrite("m", &CountData::m)
      .def_property_readonly("horizon", &CountData::horizon)
      .def_property_readonly("total", &CountData::total);

  m.def(
      "sellke_simulate",
      [](const ModelParams& p, long long n, long long m_, double horizon, std::uint64_t seed) {
        SeededRng rng(seed);
        return p.variant == Variant::GammaFrailty
                   ? sellke_simulate_frailty(p, n, m_, horizon, rng)
                   : sellke_simulate(p, n, m_, horizon, rng);
      },
      py::arg("params"), py::arg("n"), py::arg("m"), py::arg("horizon"), py::arg("seed") = 1);

  m.def(
      "simulate_dsa_counts",
      [](const ModelParams& p, long long n, long long m_, const std::vector<double>& schedule,
         std::uint64_t seed) {
        SeededRng rng(seed);
        return simulate_dsa_counts(p, n, m_, schedule, rng);
      },
      py::arg("params"), py::arg("n"), py::arg("m"), py::arg("schedule"), py::arg("seed") = 1);

  m.def("aggregate_counts", &aggregate_counts, py::arg("events"), py::arg("schedule"));

  m.def(
      "loglik_counts",
      [](const ModelParams& p, const CountData& d) { return loglik_counts(p, d).value; },
      py::arg("params"), py::arg("data"));

  m.def(
      "loglik_infection_times",
      [](const ModelParams& p, const std::vector<double>& times, double horizon,
         std::optional<long long> n) {
        return loglik_infection_times(p, times, horizon, n).value;
      },
      py::arg("params"), py::arg("times"), py::arg("horizon"), py::arg("n") = std::nullopt);

  m.def(
      "loglik_complete",
      [](const ModelParams& p, const EventRecord& ev) { return loglik_complete(p, ev).value; },
      py::arg("params"), py::arg("events"));

  m.def(
      "density_infection",
      [](const ModelParams& p, double t, double horizon) {
        Trajectory traj = solve(p, GridSpec::dense(horizon));
        return density_infection(traj, p, t, horizon);
      },
      py::arg("params"), py::arg("t"), py::arg("horizon"));

  m.def("estimate_population", &estimate_population, py::arg("data"), py::arg("trajectory"));
}
