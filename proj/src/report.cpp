#include "hivdyn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "hivdyn/presets.hpp"

namespace hivdyn {

using nlohmann::json;

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::LocallyStable: return "LocallyStable";
        case Verdict::Unstable: return "Unstable";
        case Verdict::Marginal: return "Marginal";
    }
    return "Marginal";
}

json spectrum_to_json(const EigenSpectrum& spec) {
    json out = json::array();
    for (const auto& ev : spec.eigenvalues)
        out.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    return out;
}

json stability_to_json(const StabilityReport& rep) {
    json out;
    out["verdict"] = verdict_name(rep.verdict);
    out["coefficients_positive"] = rep.coefficients_positive;
    out["composites_positive"] = rep.composites_positive;
    if (rep.factored_root) out["factored_root"] = *rep.factored_root;
    if (rep.spectrum) out["eigenvalues"] = spectrum_to_json(*rep.spectrum);
    return out;
}

json state3_to_json(const State3& s) {
    return {{"T", s.T}, {"I", s.I}, {"V", s.V}};
}

json state4_to_json(const State4& s) {
    return {{"T", s.T}, {"I", s.I}, {"L", s.L}, {"V", s.V}};
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file " + path.string());
    return out;
}

void analyze_3cm(const Scenario& sc, json& report) {
    const CoreParams& core = sc.params.core;
    report["reproduction"] = {{"R0", r0(core)},
                              {"R0_treated", r0(core, sc.efficacy)}};
    const auto eqs = equilibria_3cm(core, sc.efficacy);
    json jeq, jstab;
    jeq["endemic"] = nullptr;
    jstab["endemic"] = nullptr;
    for (const auto& eq : eqs) {
        const char* key = eq.kind == EquilibriumKind::NonInfective
                              ? "non_infective"
                              : "endemic";
        jeq[key] = state3_to_json(eq.state);
        const EigenSpectrum spec =
            eigen_spectrum(jacobian_3cm(core, sc.efficacy, eq.state));
        double radius = 0.0;
        for (const auto& ev : spec.eigenvalues)
            radius = std::max(radius, std::abs(ev));
        jstab[key] = {{"verdict",
                       verdict_name(classify_spectrum(spec, radius))},
                      {"eigenvalues", spectrum_to_json(spec)}};
    }
    report["equilibria"] = jeq;
    report["stability"] = jstab;
}

void analyze_latent(const Scenario& sc, json& report) {
    const LatentParams& lp = sc.params;
    const double q = q_ratio(lp);
    report["reproduction"] = {
        {"R0", r0(lp.core)},
        {"R0_treated", r0(lp.core, sc.efficacy)},
        {"RL", r_l(lp)},
        {"RL_treated", r_l(lp, sc.efficacy)},
        {"Q", q},
        {"one_minus_Q_percent",
         static_cast<int>(std::lround(100.0 * (1.0 - q)))},
        {"rl_equals_r0", lp.p == 0.0}};

    const auto eqs = equilibria_4cm(lp, sc.efficacy);
    json jeq;
    jeq["non_infective"] = state4_to_json(eqs[0].state);
    jeq["endemic"] =
        eqs.size() > 1 ? state4_to_json(eqs[1].state) : json(nullptr);
    report["equilibria"] = jeq;

    json jstab;
    jstab["non_infective"] = stability_to_json(
        classify_equilibrium(lp, sc.efficacy, EquilibriumKind::NonInfective));
    jstab["endemic"] =
        eqs.size() > 1
            ? stability_to_json(classify_equilibrium(
                  lp, sc.efficacy, EquilibriumKind::Endemic))
            : json(nullptr);
    report["stability"] = jstab;

    if (sc.efficacy.eps_RT < 1.0) {
        const SetpointSensitivity sens =
            setpoint_sensitivity(lp, sc.efficacy);
        report["setpoint"] = {{"V_bar", viral_setpoint(lp, sc.efficacy)},
                              {"dV_dEpsRT", sens.dV_dEpsRT},
                              {"dV_dEpsPI", sens.dV_dEpsPI}};
    } else {
        report["setpoint"] = nullptr;
    }
}

} // namespace

RunReport analyze_scenario(const Scenario& sc) {
    sc.validate();
    json report;
    report["model"] = sc.model == ModelKind::Latent ? "latent" : "3cm";
    report["efficacy"] = {{"eps_RT", sc.efficacy.eps_RT},
                          {"eps_PI", sc.efficacy.eps_PI},
                          {"eps", combined_efficacy(sc.efficacy)}};
    if (sc.model == ModelKind::Latent)
        analyze_latent(sc, report);
    else
        analyze_3cm(sc, report);
    return report;
}

Trajectory simulate_scenario(const Scenario& sc) {
    sc.validate();
    if (sc.model == ModelKind::Latent) {
        const double y0[4] = {sc.initials.T, sc.initials.I, sc.initials.L,
                              sc.initials.V};
        return integrate(make_rhs_4cm(sc.params, sc.efficacy), y0, sc.solver,
                         sc.events);
    }
    const double y0[3] = {sc.initials.T, sc.initials.I, sc.initials.V};
    return integrate(make_rhs_3cm(sc.params.core, sc.efficacy), y0, sc.solver,
                     sc.events);
}

std::vector<double> sample_times(const Trajectory& traj,
                                 const OutputOptions& opts) {
    std::vector<double> times;
    times.push_back(traj.t_begin());
    const double t_end = traj.t_end();
    if (t_end > traj.t_begin() && opts.points > 1) {
        const std::size_t n = opts.points - 1;
        if (opts.spacing == "log") {
            const double t_lo = t_end * 1e-4;
            for (std::size_t i = 0; i < n; ++i) {
                const double f =
                    n == 1 ? 1.0
                           : static_cast<double>(i) / static_cast<double>(n - 1);
                times.push_back(t_lo * std::pow(t_end / t_lo, f));
            }
        } else {
            for (std::size_t i = 1; i <= n; ++i)
                times.push_back(t_end * static_cast<double>(i) /
                                static_cast<double>(n));
        }
    }
    for (const EventRecord& ev : traj.events()) times.push_back(ev.time);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    while (!times.empty() && times.back() > t_end) times.pop_back();
    return times;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          bool latent_column,
                          const std::vector<double>& times) {
    os << (latent_column ? "t,T,I,L,V\n" : "t,T,I,V\n");
    std::vector<double> y(traj.dim());
    for (double t : times) {
        traj.evaluate(t, y);
        os << fmt_num(t);
        for (double v : y) os << ',' << fmt_num(v);
        os << '\n';
    }
}

void write_threshold_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "r,epsilon,time_days,error\n";
    for (const SweepRow& row : rows) {
        os << fmt_num(row.r) << ',' << fmt_num(row.epsilon) << ',';
        if (row.time)
            os << fmt_num(*row.time);
        else
            os << "inf";
        os << ',';
        if (!row.error.empty()) {
            std::string quoted = row.error;
            std::string::size_type pos = 0;
            while ((pos = quoted.find('"', pos)) != std::string::npos) {
                quoted.replace(pos, 1, "\"\"");
                pos += 2;
            }
            os << '"' << quoted << '"';
        }
        os << '\n';
    }
}

LyapunovRun lyapunov_scenario(const Scenario& sc, EquilibriumKind which) {
    if (sc.model != ModelKind::Latent)
        throw ConfigError("lyapunov verification requires the latent model");
    const Trajectory traj = simulate_scenario(sc);
    LyapunovRun run;
    run.report = verify_descent(sc.params, sc.efficacy, traj, which);

    const bool endemic = which == EquilibriumKind::Endemic;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto y = traj.state(i);
        const State4 s{y[0], y[1], y[2], y[3]};
        if (endemic && !(s.T > 1e-300 && s.I > 1e-300 && s.L > 1e-300 &&
                         s.V > 1e-300))
            continue; // same guard as verify_descent

        run.times.push_back(traj.time(i));
        run.u.push_back(endemic ? u_endemic(sc.params, sc.efficacy, s)
                                : u_noninfective(sc.params, sc.efficacy, s));
        run.rate_analytic.push_back(
            endemic ? u_endemic_rate(sc.params, sc.efficacy, s)
                    : u_noninfective_rate(sc.params, sc.efficacy, s));
    }
    run.rate_fd.assign(run.times.size(),
                       std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i + 1 < run.times.size(); ++i) {
        const double dt = run.times[i + 1] - run.times[i];
        if (dt > 0)
            run.rate_fd[i] = (run.u[i + 1] - run.u[i]) / dt;
    }
    return run;
}

void write_lyapunov_csv(std::ostream& os, const LyapunovRun& run) {
    os << "t,U,dUdt_analytic,dUdt_fd\n";
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        os << fmt_num(run.times[i]) << ',' << fmt_num(run.u[i]) << ','
           << fmt_num(run.rate_analytic[i]) << ',' << fmt_num(run.rate_fd[i])
           << '\n';
    }
}

RunReport cmd_analyze(const Scenario& sc, const std::filesystem::path& out_dir,
                      bool write_files) {
    RunReport report = analyze_scenario(sc);
    if (write_files) {
        auto out = open_output(out_dir / "report.json");
        out << report.dump(2) << '\n';
    }
    return report;
}

RunReport cmd_simulate(const Scenario& sc,
                       const std::filesystem::path& out_dir) {
    const Trajectory traj = simulate_scenario(sc);
    const std::vector<double> times = sample_times(traj, sc.output);
    {
        auto csv = open_output(out_dir / "trajectory.csv");
        write_trajectory_csv(csv, traj, sc.model == ModelKind::Latent, times);
    }
    RunReport report = analyze_scenario(sc);
    json sim;
    sim["t_end"] = traj.t_end();
    const auto last = traj.state(traj.size() - 1);
    sim["final_state"] =
        sc.model == ModelKind::Latent
            ? state4_to_json({last[0], last[1], last[2], last[3]})
            : json(state3_to_json({last[0], last[1], last[2]}));
    json evs = json::array();
    for (const EventRecord& ev : traj.events())
        evs.push_back({{"time", ev.time},
                       {"component", ev.component},
                       {"threshold", ev.threshold},
                       {"direction",
                        ev.direction == CrossingDirection::Downward ? "down"
                                                                    : "up"}});
    sim["events"] = evs;
    sim["csv"] = "trajectory.csv";
    report["simulation"] = sim;
    {
        auto out = open_output(out_dir / "report.json");
        out << report.dump(2) << '\n';
    }
    return report;
}

RunReport cmd_threshold(const Scenario& sc, ThresholdMetric metric, int n,
                        const std::vector<double>& r_grid, unsigned jobs,
                        const std::filesystem::path& out_dir) {
    sc.validate();
    const std::vector<SweepRow> rows =
        sweep(metric, n, r_grid, sc.params, sc.initials, sc.solver, jobs);
    {
        auto csv = open_output(out_dir / "threshold.csv");
        write_threshold_csv(csv, rows);
    }
    RunReport report;
    report["metric"] = metric == ThresholdMetric::P ? "P" : "Q";
    report["n"] = n;
    json jrows = json::array();
    for (const SweepRow& row : rows) {
        json jr = {{"r", row.r}, {"epsilon", row.epsilon}};
        jr["time_days"] = row.time ? json(*row.time) : json("inf");
        if (!row.error.empty()) jr["error"] = row.error;
        jrows.push_back(jr);
    }
    report["rows"] = jrows;
    report["csv"] = "threshold.csv";
    {
        auto out = open_output(out_dir / "threshold.json");
        out << report.dump(2) << '\n';
    }
    return report;
}

RunReport cmd_lyapunov(const Scenario& sc, EquilibriumKind which,
                       const std::filesystem::path& out_dir) {
    const LyapunovRun run = lyapunov_scenario(sc, which);
    {
        auto csv = open_output(out_dir / "lyapunov.csv");
        write_lyapunov_csv(csv, run);
    }
    RunReport report;
    report["which"] = which == EquilibriumKind::Endemic ? "endemic"
                                                        : "non_infective";
    report["pass"] = run.report.pass;
    report["max_rate_analytic"] = run.report.max_rate_analytic;
    report["max_rate_fd"] = run.report.max_rate_fd;
    report["tolerance"] = run.report.tolerance;
    report["u_initial"] = run.report.u_initial;
    report["u_final"] = run.report.u_final;
    report["u_max"] = run.report.u_max;
    report["samples"] = run.report.samples;
    report["csv"] = "lyapunov.csv";
    {
        auto out = open_output(out_dir / "lyapunov.json");
        out << report.dump(2) << '\n';
    }
    return report;
}

} // namespace hivdyn
