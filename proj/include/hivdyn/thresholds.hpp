#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hivdyn/integrator.hpp"

namespace hivdyn {

enum class ModelKind { ThreeComponent, Latent };

enum class ThresholdMetric { P, Q };

/// First time the viral load falls below 10^-n, or Infinite (nullopt) if no
/// crossing occurs within the solver horizon.
struct ThresholdResult {
    std::optional<double> time; ///< days; nullopt means Infinite
    double epsilon_used;
    double r_achieved;
};

/// Protease-inhibitor efficacy eps = 1 - r / R_untreated pinning the treated
/// reproduction number of the chosen model at r.  Throws DomainError unless
/// 0 < r <= R_untreated.
double efficacy_for_ratio(ModelKind model, const LatentParams& lp, double r);

/// P_n(r): time for the treated three-component viral load to reach 10^-n
/// when therapy pins the reproduction number at r.  Infimum convention:
/// returns 0 when the initial load is already at or below the threshold.
ThresholdResult p_n(const CoreParams& core, const State3& init, int n,
                    double r, const SolverConfig& solver);

/// Q_n(r): the latent-model analogue.
ThresholdResult q_n(const LatentParams& lp, const State4& init, int n,
                    double r, const SolverConfig& solver);

struct SweepRow {
    double r;
    double epsilon;
    std::optional<double> time; ///< nullopt means Infinite
    std::string error;          ///< empty on success
};

/// Evaluates the chosen metric over a grid of reproduction ratios.  Rows come
/// back in grid order; per-point failures are recorded in the error field and
/// do not abort the sweep.  Points are independent and evaluated on up to
/// `jobs` worker threads (0 = hardware concurrency).
std::vector<SweepRow> sweep(ThresholdMetric metric, int n,
                            std::span<const double> r_grid,
                            const LatentParams& lp, const State4& init,
                            const SolverConfig& solver, unsigned jobs = 0);

} // namespace hivdyn
