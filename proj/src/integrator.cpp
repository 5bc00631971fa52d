#include "hivdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hivdyn {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Companion quartic interpolant weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kMinStep = 1e-12;       // days; below this the problem is
                                         // declared stiff for this pair
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;           // PI controller integral gain
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kEventTimeTol = 1e-6;   // days

bool crossing_satisfied(double value, const EventSpec& ev) {
    return ev.direction == CrossingDirection::Downward ? value <= ev.threshold
                                                       : value >= ev.threshold;
}

double interp(const double* rc, double theta) {
    const double omt = 1.0 - theta;
    return rc[0] + theta * (rc[1] + omt * (rc[2] + theta * (rc[3] + omt * rc[4])));
}

} // namespace

void SolverConfig::validate(std::size_t dim) const {
    if (!(rtol >= 1e-12 && rtol <= 1e-2))
        throw DomainError("SolverConfig: rtol must lie in [1e-12, 1e-2]");
    if (atol.size() != dim)
        throw DomainError("SolverConfig: atol must have one entry per state "
                          "component");
    for (double a : atol)
        if (!(a > 0) || !std::isfinite(a))
            throw DomainError("SolverConfig: every atol must be positive");
    if (!(h_init > 0) || !(h_max > 0))
        throw DomainError("SolverConfig: step sizes must be positive");
    if (!(t_max >= 0) || !std::isfinite(t_max))
        throw DomainError("SolverConfig: t_max must be finite and nonnegative");
}

SolverConfig SolverConfig::defaults3() {
    SolverConfig cfg;
    cfg.atol = {1e-12, 1e-12, 1e-13};
    return cfg;
}

SolverConfig SolverConfig::defaults4() {
    SolverConfig cfg;
    cfg.atol = {1e-12, 1e-12, 1e-12, 1e-13};
    return cfg;
}

std::size_t Trajectory::locate_step(double t) const {
    const std::size_t steps = times_.size() - 1;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - times_.begin());
    idx = idx == 0 ? 0 : idx - 1;
    return std::min(idx, steps - 1);
}

void Trajectory::evaluate(double t, std::span<double> out) const {
    if (times_.size() == 1) {
        if (t != times_.front())
            throw DomainError("Trajectory::evaluate: time outside range");
        std::copy(states_.begin(), states_.end(), out.begin());
        return;
    }
    if (!(t >= times_.front() && t <= times_.back()))
        throw DomainError("Trajectory::evaluate: time outside range");
    const std::size_t step = locate_step(t);
    const double h = times_[step + 1] - times_[step];
    const double theta = (t - times_[step]) / h;
    const double* rc = rcont_.data() + step * 5 * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double coeffs[5] = {rc[i], rc[dim_ + i], rc[2 * dim_ + i],
                                  rc[3 * dim_ + i], rc[4 * dim_ + i]};
        out[i] = interp(coeffs, theta);
    }
}

double Trajectory::evaluate_component(double t, std::size_t component) const {
    if (times_.size() == 1) {
        if (t != times_.front())
            throw DomainError("Trajectory::evaluate: time outside range");
        return states_[component];
    }
    if (!(t >= times_.front() && t <= times_.back()))
        throw DomainError("Trajectory::evaluate: time outside range");
    const std::size_t step = locate_step(t);
    const double h = times_[step + 1] - times_[step];
    const double theta = (t - times_[step]) / h;
    const double* rc = rcont_.data() + step * 5 * dim_;
    const std::size_t i = component;
    const double coeffs[5] = {rc[i], rc[dim_ + i], rc[2 * dim_ + i],
                              rc[3 * dim_ + i], rc[4 * dim_ + i]};
    return interp(coeffs, theta);
}

namespace {

// Earliest crossing of `ev` strictly inside step `step` of `traj`, localized
// by bisection on the interpolant.  The step is scanned at six interior
// sample points, so a crossing is found whenever the component transitions
// across the threshold between neighbouring samples.
std::optional<double> crossing_in_step(const Trajectory& traj,
                                       std::size_t step, const EventSpec& ev) {
    const double t0 = traj.time(step);
    const double t1 = traj.time(step + 1);
    constexpr int kSamples = 6;
    double ts[kSamples];
    double gs[kSamples];
    for (int i = 0; i < kSamples; ++i) {
        ts[i] = t0 + (t1 - t0) * i / (kSamples - 1);
        gs[i] = traj.evaluate_component(ts[i], ev.component);
    }
    for (int i = 0; i + 1 < kSamples; ++i) {
        if (crossing_satisfied(gs[i], ev) || !crossing_satisfied(gs[i + 1], ev))
            continue;
        double lo = ts[i], hi = ts[i + 1];
        while (hi - lo > kEventTimeTol) {
            const double mid = 0.5 * (lo + hi);
            if (crossing_satisfied(
                    traj.evaluate_component(mid, ev.component), ev))
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }
    return std::nullopt;
}

} // namespace

Trajectory integrate(const RhsFn& rhs, std::span<const double> y0,
                     const SolverConfig& cfg,
                     std::span<const EventSpec> events) {
    const std::size_t dim = y0.size();
    if (dim == 0) throw DomainError("integrate: empty initial state");
    cfg.validate(dim);
    for (const EventSpec& ev : events) {
        if (ev.component >= dim)
            throw DomainError("integrate: event component out of range");
        if (!(ev.threshold > 0))
            throw DomainError("integrate: event threshold must be positive");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (!std::isfinite(y0[i]))
            throw InvalidStateError("integrate: non-finite initial component");
        if (y0[i] < 0)
            throw DomainError("integrate: initial state must be nonnegative");
    }

    Trajectory traj;
    traj.dim_ = dim;
    traj.times_.push_back(0.0);
    traj.states_.assign(y0.begin(), y0.end());
    if (cfg.t_max == 0.0) return traj;

    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> ynew(dim), ytmp(dim);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
        k7(dim);
    const auto call = [&](double t, const std::vector<double>& yy,
                          std::vector<double>& out) {
        rhs(t, std::span<const double>(yy.data(), dim),
            std::span<double>(out.data(), dim));
    };

    double t = 0.0;
    call(t, y, k1);
    double h = std::min({cfg.h_init, cfg.h_max, cfg.t_max});
    double errold = 1e-4;
    bool rejected = false;
    bool finished = false;
    bool terminated = false;

    while (!finished && !terminated) {
        if (h < kMinStep)
            throw StiffnessError(
                "integrate: step size underflow below 1e-12 day at t = " +
                std::to_string(t));
        bool last = false;
        if (t + h >= cfg.t_max) {
            h = cfg.t_max - t;
            last = true;
        }

        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        call(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        call(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        call(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        call(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        call(t + h, ytmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
        call(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sc =
                cfg.atol[i] +
                cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(dim));

        if (!std::isfinite(err) || err > 1.0) {
            const double shrink =
                std::isfinite(err)
                    ? std::max(0.2, kSafety * std::pow(err, -0.2))
                    : 0.2;
            h *= shrink;
            rejected = true;
            continue;
        }

        // Accepted step: positivity policy, dense coefficients, events.
        for (std::size_t i = 0; i < dim; ++i) {
            if (ynew[i] < -10.0 * cfg.atol[i])
                throw PositivityError(
                    "integrate: component " + std::to_string(i) +
                    " fell below -10*atol at t = " + std::to_string(t + h));
        }

        const std::size_t base = traj.rcont_.size();
        traj.rcont_.resize(base + 5 * dim);
        double* rc = traj.rcont_.data() + base;
        for (std::size_t i = 0; i < dim; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            rc[i] = y[i];
            rc[dim + i] = ydiff;
            rc[2 * dim + i] = bspl;
            rc[3 * dim + i] = ydiff - h * k7[i] - bspl;
            rc[4 * dim + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                   d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        const double t_new = last ? cfg.t_max : t + h;
        traj.times_.push_back(t_new);
        for (std::size_t i = 0; i < dim; ++i)
            traj.states_.push_back(std::max(ynew[i], -cfg.atol[i]));

        const std::size_t step = traj.times_.size() - 2;
        double stop_time = 0.0;
        std::size_t before = traj.events_.size();
        for (const EventSpec& ev : events) {
            if (auto tc = crossing_in_step(traj, step, ev)) {
                traj.events_.push_back(
                    {*tc, ev.component, ev.threshold, ev.direction});
                if (ev.terminal && (!terminated || *tc < stop_time)) {
                    terminated = true;
                    stop_time = *tc;
                }
            }
        }
        if (traj.events_.size() > before) {
            std::sort(traj.events_.begin() + before, traj.events_.end(),
                      [](const EventRecord& a, const EventRecord& b) {
                          return a.time < b.time;
                      });
            if (terminated)
                std::erase_if(traj.events_, [&](const EventRecord& r) {
                    return r.time > stop_time;
                });
        }

        t = t_new;
        y.swap(ynew);
        k1.swap(k7);
        if (last) finished = true;

        double grow = kSafety * std::pow(std::max(err, 1e-30), -kExpo) *
                      std::pow(errold, kBeta);
        grow = std::clamp(grow, 0.2, 10.0);
        if (rejected) grow = std::min(grow, 1.0);
        rejected = false;
        errold = std::max(err, 1e-4);
        h = std::min(h * grow, cfg.h_max);
    }

    return traj;
}

std::optional<double> first_crossing(const Trajectory& traj,
                                     const EventSpec& ev) {
    if (traj.size() == 0) return std::nullopt;
    if (ev.component >= traj.dim())
        throw DomainError("first_crossing: component out of range");
    if (crossing_satisfied(traj.state(0)[ev.component], ev)) return 0.0;
    for (std::size_t step = 0; step + 1 < traj.size(); ++step) {
        if (auto tc = crossing_in_step(traj, step, ev)) return *tc;
    }
    return std::nullopt;
}

} // namespace hivdyn
