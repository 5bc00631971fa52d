#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hivdyn/lyapunov.hpp"
#include "hivdyn/presets.hpp"
#include "hivdyn/stability.hpp"
#include "hivdyn/thresholds.hpp"

namespace py = pybind11;
using namespace hivdyn;

namespace {

RhsFn wrap_callable(py::object f, std::size_t dim) {
    return [f = std::move(f), dim](double t, std::span<const double> y,
                                   std::span<double> dydt) {
        py::list state;
        for (std::size_t i = 0; i < dim; ++i) state.append(y[i]);
        const auto out = f(t, state).cast<std::vector<double>>();
        if (out.size() != dim)
            throw std::runtime_error("rhs callable returned wrong dimension");
        for (std::size_t i = 0; i < dim; ++i) dydt[i] = out[i];
    };
}

py::array_t<double> trajectory_times(const Trajectory& traj) {
    py::array_t<double> out(static_cast<py::ssize_t>(traj.size()));
    auto buf = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < traj.size(); ++i)
        buf(static_cast<py::ssize_t>(i)) = traj.time(i);
    return out;
}

py::array_t<double> trajectory_states(const Trajectory& traj) {
    py::array_t<double> out({static_cast<py::ssize_t>(traj.size()),
                             static_cast<py::ssize_t>(traj.dim())});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto s = traj.state(i);
        for (std::size_t c = 0; c < traj.dim(); ++c)
            buf(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(c)) =
                s[c];
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Within-host viral dynamics: latent-reservoir models, "
              "stability analysis and eradication-time metrics";

    py::register_exception<InvalidStateError>(m, "InvalidStateError",
                                              PyExc_ValueError);
    py::register_exception<EndemicAbsentError>(m, "EndemicAbsentError",
                                               PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError",
                                         PyExc_ArithmeticError);

    py::class_<CoreParams>(m, "CoreParams")
        .def(py::init<double, double, double, double, double, double>(),
             py::arg("lambda_"), py::arg("d_T"), py::arg("d_I"),
             py::arg("d_V"), py::arg("k"), py::arg("N"))
        .def_readwrite("lambda_", &CoreParams::lambda)
        .def_readwrite("d_T", &CoreParams::d_T)
        .def_readwrite("d_I", &CoreParams::d_I)
        .def_readwrite("d_V", &CoreParams::d_V)
        .def_readwrite("k", &CoreParams::k)
        .def_readwrite("N", &CoreParams::N)
        .def("validate", &CoreParams::validate);

    py::class_<LatentParams>(m, "LatentParams")
        .def(py::init<CoreParams, double, double, double>(), py::arg("core"),
             py::arg("p"), py::arg("alpha"), py::arg("d_L"))
        .def_readwrite("core", &LatentParams::core)
        .def_readwrite("p", &LatentParams::p)
        .def_readwrite("alpha", &LatentParams::alpha)
        .def_readwrite("d_L", &LatentParams::d_L)
        .def("validate", &LatentParams::validate);

    py::class_<Efficacy>(m, "Efficacy")
        .def(py::init<double, double>(), py::arg("eps_RT") = 0.0,
             py::arg("eps_PI") = 0.0)
        .def_readwrite("eps_RT", &Efficacy::eps_RT)
        .def_readwrite("eps_PI", &Efficacy::eps_PI);

    py::class_<State3>(m, "State3")
        .def(py::init<double, double, double>(), py::arg("T") = 0.0,
             py::arg("I") = 0.0, py::arg("V") = 0.0)
        .def_readwrite("T", &State3::T)
        .def_readwrite("I", &State3::I)
        .def_readwrite("V", &State3::V);

    py::class_<State4>(m, "State4")
        .def(py::init<double, double, double, double>(), py::arg("T") = 0.0,
             py::arg("I") = 0.0, py::arg("L") = 0.0, py::arg("V") = 0.0)
        .def_readwrite("T", &State4::T)
        .def_readwrite("I", &State4::I)
        .def_readwrite("L", &State4::L)
        .def_readwrite("V", &State4::V);

    m.def("combined_efficacy", &combined_efficacy);
    m.def("effective_params", &effective_params);
    m.def("rhs_3cm", &rhs_3cm);
    m.def("rhs_4cm", &rhs_4cm);

    py::enum_<EquilibriumKind>(m, "EquilibriumKind")
        .value("NonInfective", EquilibriumKind::NonInfective)
        .value("Endemic", EquilibriumKind::Endemic);

    py::class_<Equilibrium3>(m, "Equilibrium3")
        .def_readonly("state", &Equilibrium3::state)
        .def_readonly("kind", &Equilibrium3::kind);
    py::class_<Equilibrium4>(m, "Equilibrium4")
        .def_readonly("state", &Equilibrium4::state)
        .def_readonly("kind", &Equilibrium4::kind);
    py::class_<SetpointSensitivity>(m, "SetpointSensitivity")
        .def_readonly("dV_dEpsRT", &SetpointSensitivity::dV_dEpsRT)
        .def_readonly("dV_dEpsPI", &SetpointSensitivity::dV_dEpsPI);

    m.def("r0", &r0, py::arg("core"), py::arg("eff") = Efficacy{});
    m.def("r_l", &r_l, py::arg("lp"), py::arg("eff") = Efficacy{});
    m.def("q_ratio", &q_ratio);
    m.def("equilibria_3cm", &equilibria_3cm, py::arg("core"),
          py::arg("eff") = Efficacy{});
    m.def("equilibria_4cm", &equilibria_4cm, py::arg("lp"),
          py::arg("eff") = Efficacy{});
    m.def("viral_setpoint", &viral_setpoint);
    m.def("setpoint_sensitivity", &setpoint_sensitivity);

    m.def("jacobian_3cm", &jacobian_3cm);
    m.def("jacobian_4cm", &jacobian_4cm);

    py::class_<CharCoeffsCubic>(m, "CharCoeffsCubic")
        .def(py::init<double, double, double>(), py::arg("A1"), py::arg("A2"),
             py::arg("A3"))
        .def_readonly("A1", &CharCoeffsCubic::A1)
        .def_readonly("A2", &CharCoeffsCubic::A2)
        .def_readonly("A3", &CharCoeffsCubic::A3);
    py::class_<CharCoeffsQuartic>(m, "CharCoeffsQuartic")
        .def(py::init<double, double, double, double>(), py::arg("A1"),
             py::arg("A2"), py::arg("A3"), py::arg("A4"))
        .def_readonly("A1", &CharCoeffsQuartic::A1)
        .def_readonly("A2", &CharCoeffsQuartic::A2)
        .def_readonly("A3", &CharCoeffsQuartic::A3)
        .def_readonly("A4", &CharCoeffsQuartic::A4);

    m.def("char_coeffs_noninfective", &char_coeffs_noninfective,
          py::arg("lp"), py::arg("eff") = Efficacy{});
    m.def("char_coeffs_endemic", &char_coeffs_endemic, py::arg("lp"),
          py::arg("eff") = Efficacy{});

    py::class_<EigenSpectrum>(m, "EigenSpectrum")
        .def_readonly("eigenvalues", &EigenSpectrum::eigenvalues)
        .def("max_real_part", &EigenSpectrum::max_real_part);
    m.def("eigen_spectrum", &eigen_spectrum);

    py::enum_<Verdict>(m, "Verdict")
        .value("LocallyStable", Verdict::LocallyStable)
        .value("Unstable", Verdict::Unstable)
        .value("Marginal", Verdict::Marginal);

    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("coefficients_positive",
                      &StabilityReport::coefficients_positive)
        .def_readonly("composites_positive",
                      &StabilityReport::composites_positive)
        .def_readonly("verdict", &StabilityReport::verdict)
        .def_readonly("factored_root", &StabilityReport::factored_root)
        .def_readonly("spectrum", &StabilityReport::spectrum)
        .def("all_conditions_hold", &StabilityReport::all_conditions_hold);

    m.def("routh_hurwitz_cubic", &routh_hurwitz_cubic);
    m.def("routh_hurwitz_quartic", &routh_hurwitz_quartic);
    m.def("classify_equilibrium", &classify_equilibrium);
    m.def("classify_spectrum", &classify_spectrum);

    m.def("u_noninfective", &u_noninfective);
    m.def("u_noninfective_rate", &u_noninfective_rate);
    m.def("u_endemic", &u_endemic);
    m.def("u_endemic_rate", &u_endemic_rate);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_static("defaults3", &SolverConfig::defaults3)
        .def_static("defaults4", &SolverConfig::defaults4)
        .def_readwrite("rtol", &SolverConfig::rtol)
        .def_readwrite("atol", &SolverConfig::atol)
        .def_readwrite("h_init", &SolverConfig::h_init)
        .def_readwrite("h_max", &SolverConfig::h_max)
        .def_readwrite("t_max", &SolverConfig::t_max);

    py::enum_<CrossingDirection>(m, "CrossingDirection")
        .value("Downward", CrossingDirection::Downward)
        .value("Upward", CrossingDirection::Upward);

    py::class_<EventSpec>(m, "EventSpec")
        .def(py::init<std::size_t, double, CrossingDirection, bool>(),
             py::arg("component"), py::arg("threshold"),
             py::arg("direction") = CrossingDirection::Downward,
             py::arg("terminal") = false)
        .def_readwrite("component", &EventSpec::component)
        .def_readwrite("threshold", &EventSpec::threshold)
        .def_readwrite("direction", &EventSpec::direction)
        .def_readwrite("terminal", &EventSpec::terminal);

    py::class_<EventRecord>(m, "EventRecord")
        .def_readonly("time", &EventRecord::time)
        .def_readonly("component", &EventRecord::component)
        .def_readonly("threshold", &EventRecord::threshold)
        .def_readonly("direction", &EventRecord::direction);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times", &trajectory_times)
        .def_property_readonly("states", &trajectory_states)
        .def_property_readonly("events", &Trajectory::events)
        .def("t_end", &Trajectory::t_end)
        .def("evaluate",
             [](const Trajectory& traj, double t) {
                 std::vector<double> out(traj.dim());
                 traj.evaluate(t, out);
                 return out;
             })
        .def("__len__", &Trajectory::size);

    m.def(
        "integrate",
        [](py::object rhs, std::vector<double> y0, const SolverConfig& cfg,
           std::vector<EventSpec> events) {
            return integrate(wrap_callable(std::move(rhs), y0.size()), y0,
                             cfg, events);
        },
        py::arg("rhs"), py::arg("y0"), py::arg("config"),
        py::arg("events") = std::vector<EventSpec>{});
    m.def(
        "simulate_3cm",
        [](const CoreParams& core, const Efficacy& eff, const State3& init,
           const SolverConfig& cfg, std::vector<EventSpec> events) {
            const double y0[3] = {init.T, init.I, init.V};
            return integrate(make_rhs_3cm(core, eff), y0, cfg, events);
        },
        py::arg("core"), py::arg("eff"), py::arg("init"), py::arg("config"),
        py::arg("events") = std::vector<EventSpec>{});
    m.def(
        "simulate_4cm",
        [](const LatentParams& lp, const Efficacy& eff, const State4& init,
           const SolverConfig& cfg, std::vector<EventSpec> events) {
            const double y0[4] = {init.T, init.I, init.L, init.V};
            return integrate(make_rhs_4cm(lp, eff), y0, cfg, events);
        },
        py::arg("lp"), py::arg("eff"), py::arg("init"), py::arg("config"),
        py::arg("events") = std::vector<EventSpec>{});
    m.def("first_crossing", &first_crossing);

    py::class_<DescentReport>(m, "DescentReport")
        .def_readonly("max_rate_analytic", &DescentReport::max_rate_analytic)
        .def_readonly("max_rate_fd", &DescentReport::max_rate_fd)
        .def_readonly("u_max", &DescentReport::u_max)
        .def_readonly("u_initial", &DescentReport::u_initial)
        .def_readonly("u_final", &DescentReport::u_final)
        .def_readonly("tolerance", &DescentReport::tolerance)
        .def_readonly("samples", &DescentReport::samples)
        .def_readonly("pass_", &DescentReport::pass);
    m.def("verify_descent", &verify_descent);

    py::enum_<ModelKind>(m, "ModelKind")
        .value("ThreeComponent", ModelKind::ThreeComponent)
        .value("Latent", ModelKind::Latent);
    py::enum_<ThresholdMetric>(m, "ThresholdMetric")
        .value("P", ThresholdMetric::P)
        .value("Q", ThresholdMetric::Q);

    py::class_<ThresholdResult>(m, "ThresholdResult")
        .def_readonly("time", &ThresholdResult::time)
        .def_readonly("epsilon_used", &ThresholdResult::epsilon_used)
        .def_readonly("r_achieved", &ThresholdResult::r_achieved);
    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("r", &SweepRow::r)
        .def_readonly("epsilon", &SweepRow::epsilon)
        .def_readonly("time", &SweepRow::time)
        .def_readonly("error", &SweepRow::error);

    m.def("efficacy_for_ratio", &efficacy_for_ratio);
    m.def("p_n", &p_n, py::arg("core"), py::arg("init"), py::arg("n"),
          py::arg("r"), py::arg("solver"));
    m.def("q_n", &q_n, py::arg("lp"), py::arg("init"), py::arg("n"),
          py::arg("r"), py::arg("solver"));
    m.def(
        "sweep",
        [](ThresholdMetric metric, int n, std::vector<double> grid,
           const LatentParams& lp, const State4& init,
           const SolverConfig& solver, unsigned jobs) {
            return sweep(metric, n, grid, lp, init, solver, jobs);
        },
        py::arg("metric"), py::arg("n"), py::arg("r_grid"), py::arg("lp"),
        py::arg("init"), py::arg("solver"), py::arg("jobs") = 0u);

    m.def("preset_table1", &preset_table1);
    m.def("preset_init_default", &preset_init_default);
}
