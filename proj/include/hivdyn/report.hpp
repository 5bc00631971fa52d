#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <nlohmann/json.hpp>

#include "hivdyn/lyapunov.hpp"
#include "hivdyn/scenario.hpp"
#include "hivdyn/stability.hpp"

namespace hivdyn {

/// Structured result of an `analyze` run: reproduction numbers, equilibria,
/// stability verdicts and setpoint sensitivities, serialized as JSON with
/// full-precision numbers.
using RunReport = nlohmann::json;

RunReport analyze_scenario(const Scenario& sc);

/// Runs the scenario's model to solver.t_max and returns the trajectory.
Trajectory simulate_scenario(const Scenario& sc);

/// Sample times written by `simulate`: t = 0, `points` log- or linearly
/// spaced values up to the trajectory end, and every recorded event time.
std::vector<double> sample_times(const Trajectory& traj,
                                 const OutputOptions& opts);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          bool latent_column,
                          const std::vector<double>& times);

void write_threshold_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct LyapunovRun {
    std::vector<double> times;
    std::vector<double> u;
    std::vector<double> rate_analytic;
    std::vector<double> rate_fd;
    DescentReport report;
};

LyapunovRun lyapunov_scenario(const Scenario& sc, EquilibriumKind which);

void write_lyapunov_csv(std::ostream& os, const LyapunovRun& run);

/// Command entry points shared by the CLI and the tests.  Each writes its
/// files under `out_dir` and returns the sidecar report.
RunReport cmd_analyze(const Scenario& sc, const std::filesystem::path& out_dir,
                      bool write_files);
RunReport cmd_simulate(const Scenario& sc,
                       const std::filesystem::path& out_dir);
RunReport cmd_threshold(const Scenario& sc, ThresholdMetric metric, int n,
                        const std::vector<double>& r_grid, unsigned jobs,
                        const std::filesystem::path& out_dir);
RunReport cmd_lyapunov(const Scenario& sc, EquilibriumKind which,
                       const std::filesystem::path& out_dir);

} // namespace hivdyn
