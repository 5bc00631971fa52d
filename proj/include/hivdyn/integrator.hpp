#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hivdyn/model.hpp"

namespace hivdyn {

/// Adaptive step-size control settings.  `atol` holds one absolute tolerance
/// per state component; defaults keep the virion component resolvable far
/// below the clearance thresholds of interest.
struct SolverConfig {
    double rtol = 1e-8;
    std::vector<double> atol;
    double h_init = 1e-2; ///< days
    double h_max = 1.0;   ///< days
    double t_max = 1e4;   ///< days

    void validate(std::size_t dim) const;

    static SolverConfig defaults3(); ///< atol = {1e-12, 1e-12, 1e-13}
    static SolverConfig defaults4(); ///< atol = {1e-12, 1e-12, 1e-12, 1e-13}
};

enum class CrossingDirection { Downward, Upward };

/// A threshold crossing to watch for on one state component.
struct EventSpec {
    std::size_t component = 0;
    double threshold = 0.0; ///< must be > 0
    CrossingDirection direction = CrossingDirection::Downward;
    bool terminal = false; ///< stop the integration once the event fires
};

struct EventRecord {
    double time;
    std::size_t component;
    double threshold;
    CrossingDirection direction;
};

/// Dense ODE solution: accepted sample points plus a quartic interpolant per
/// step, immutable after construction.
class Trajectory {
public:
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    double time(std::size_t i) const { return times_[i]; }
    std::span<const double> state(std::size_t i) const {
        return {states_.data() + i * dim_, dim_};
    }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }

    /// Interpolated state at any t in [t_begin, t_end].
    void evaluate(double t, std::span<double> out) const;
    double evaluate_component(double t, std::size_t component) const;

    const std::vector<EventRecord>& events() const { return events_; }

private:
    friend Trajectory integrate(const RhsFn&, std::span<const double>,
                                const SolverConfig&,
                                std::span<const EventSpec>);

    std::size_t locate_step(double t) const;

    std::size_t dim_ = 0;
    std::vector<double> times_;  ///< strictly increasing, size steps + 1
    std::vector<double> states_; ///< (steps + 1) * dim
    std::vector<double> rcont_;  ///< steps * 5 * dim interpolant coefficients
    std::vector<EventRecord> events_;
};

/// Integrates y' = rhs(t, y) from t = 0 to cfg.t_max with the Dormand-Prince
/// 5(4) embedded pair, PI step control and dense output.  Events are located
/// on the interpolant by bisection to 1e-6 day.
///
/// Throws DomainError for negative initial components, StiffnessError when
/// the step size collapses below 1e-12 day, and PositivityError when a
/// component undershoots below -10 * atol.  Undershoot within [-atol, 0) is
/// stored as-is; within [-10 atol, -atol) the stored value is clamped to
/// -atol.
Trajectory integrate(const RhsFn& rhs, std::span<const double> y0,
                     const SolverConfig& cfg,
                     std::span<const EventSpec> events = {});

/// Infimum time at which the trajectory crosses the given threshold, scanning
/// the stored interpolants; returns 0 if the initial state already satisfies
/// the crossing condition and nullopt if no crossing occurs.
std::optional<double> first_crossing(const Trajectory& traj,
                                     const EventSpec& ev);

} // namespace hivdyn
