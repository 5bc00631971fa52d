#include "hivdyn/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace hivdyn {

namespace {

// Components below this are rejected in endemic mode rather than fed to log.
constexpr double kLogGuard = 1e-300;

// x - x* - x* ln(x/x*), the nonnegative barrier vanishing at x = x*,
// extended by continuity to x* = 0.
double barrier(double x, double xstar) {
    if (xstar <= 0.0) return x;
    return x - xstar - xstar * std::log(x / xstar);
}

double clamp_undershoot(double x) { return x < 0.0 ? 0.0 : x; }

struct Weights {
    double c_T;  // (1-p) d_L + alpha
    double c_IV; // d_L + alpha
    double Np;   // N (1 - eps_PI)
};

Weights weights(const LatentParams& lp, const Efficacy& eff) {
    const double Np = lp.core.N * (1.0 - eff.eps_PI);
    if (!(Np > 0.0))
        throw DomainError("lyapunov: eps_PI = 1 leaves no virion production "
                          "to weigh");
    return {(1.0 - lp.p) * lp.d_L + lp.alpha, lp.d_L + lp.alpha, Np};
}

State4 endemic_point(const LatentParams& lp, const Efficacy& eff) {
    const auto eqs = equilibria_4cm(lp, eff);
    if (eqs.size() < 2)
        throw EndemicAbsentError(
            "lyapunov: no endemic equilibrium (R_L <= 1)");
    return eqs[1].state;
}

} // namespace

double u_noninfective(const LatentParams& lp, const Efficacy& eff,
                      const State4& s) {
    if (!(s.T > 0.0))
        throw DomainError("u_noninfective: T must be positive");
    const Weights w = weights(lp, eff);
    const double T0 = lp.core.lambda / lp.core.d_T;
    const double I = clamp_undershoot(s.I);
    const double L = clamp_undershoot(s.L);
    const double V = clamp_undershoot(s.V);
    return w.c_T * barrier(s.T, T0) + w.c_IV * (I + V / w.Np) + lp.alpha * L;
}

double u_noninfective_rate(const LatentParams& lp, const Efficacy& eff,
                           const State4& s) {
    if (!(s.T > 0.0))
        throw DomainError("u_noninfective_rate: T must be positive");
    const Weights w = weights(lp, eff);
    const CoreParams& c = lp.core;
    const double supply = c.lambda - c.d_T * s.T;
    const double V = clamp_undershoot(s.V);
    return -w.c_T * supply * supply / (c.d_T * s.T) +
           w.c_IV * c.d_V / w.Np * (r_l(lp, eff) - 1.0) * V;
}

double u_endemic(const LatentParams& lp, const Efficacy& eff,
                 const State4& s) {
    const State4 eq = endemic_point(lp, eff);
    if (!(s.T > kLogGuard && s.I > kLogGuard && s.V > kLogGuard) ||
        (eq.L > 0.0 && !(s.L > kLogGuard)))
        throw DomainError("u_endemic: state components must be positive");
    const Weights w = weights(lp, eff);
    return w.c_T * barrier(s.T, eq.T) +
           w.c_IV * (barrier(s.I, eq.I) + barrier(s.V, eq.V) / w.Np) +
           lp.alpha * barrier(s.L, eq.L);
}

double u_endemic_rate(const LatentParams& lp, const Efficacy& eff,
                      const State4& s) {
    const State4 eq = endemic_point(lp, eff);
    if (!(s.T > kLogGuard && s.I > kLogGuard && s.V > kLogGuard) ||
        (eq.L > 0.0 && !(s.L > kLogGuard)))
        throw DomainError("u_endemic_rate: state components must be positive");
    const CoreParams& c = lp.core;
    const Weights w = weights(lp, eff);
    const double kp = c.k * (1.0 - eff.eps_RT);

    const double x = s.T / eq.T;
    const double inv_x = eq.T / s.T;
    const double flux = kp * eq.T * eq.V; // infection flux at equilibrium

    const double two_term = w.c_T * c.d_T * eq.T * (2.0 - x - inv_x);

    const double xw_over_y = s.T * s.V * eq.I / (eq.T * eq.V * s.I);
    const double y_over_w = s.I * eq.V / (eq.I * s.V);
    const double three_term = (1.0 - lp.p) * w.c_IV * flux *
                              (3.0 - inv_x - xw_over_y - y_over_w);

    // The activation bracket, written so that the p = 0 (L* = 0) limit stays
    // finite: alpha p flux equals alpha (d_L + alpha) L*.
    const double four_term =
        lp.alpha * w.c_IV *
        (eq.L * (4.0 - inv_x - y_over_w) -
         eq.L * eq.L * s.T * s.V / (eq.T * eq.V * s.L) - s.L * eq.I / s.I);

    return two_term + three_term + four_term;
}

DescentReport verify_descent(const LatentParams& lp, const Efficacy& eff,
                             const Trajectory& traj, EquilibriumKind which) {
    if (traj.dim() != 4)
        throw DomainError("verify_descent: expected a four-component "
                          "trajectory");
    const bool endemic = which == EquilibriumKind::Endemic;

    std::vector<double> ts, us, rates;
    ts.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto y = traj.state(i);
        const State4 s{y[0], y[1], y[2], y[3]};
        if (endemic &&
            !(s.T > kLogGuard && s.I > kLogGuard && s.L > kLogGuard &&
              s.V > kLogGuard))
            continue; // zero-seeded first sample: U is infinite there
        ts.push_back(traj.time(i));
        us.push_back(endemic ? u_endemic(lp, eff, s)
                             : u_noninfective(lp, eff, s));
        rates.push_back(endemic ? u_endemic_rate(lp, eff, s)
                                : u_noninfective_rate(lp, eff, s));
    }

    DescentReport rep{};
    rep.samples = ts.size();
    rep.max_rate_analytic = -std::numeric_limits<double>::infinity();
    rep.max_rate_fd = -std::numeric_limits<double>::infinity();
    if (ts.empty()) {
        rep.pass = false;
        return rep;
    }
    rep.u_initial = us.front();
    rep.u_final = us.back();
    rep.u_max = 0.0;
    for (double u : us) rep.u_max = std::max(rep.u_max, std::abs(u));
    for (double r : rates) rep.max_rate_analytic = std::max(rep.max_rate_analytic, r);
    for (std::size_t i = 0; i + 1 < us.size(); ++i) {
        const double dt = ts[i + 1] - ts[i];
        if (dt > 0.0)
            rep.max_rate_fd =
                std::max(rep.max_rate_fd, (us[i + 1] - us[i]) / dt);
    }
    if (us.size() < 2) rep.max_rate_fd = 0.0;
    rep.tolerance = 1e-6 * rep.u_max;
    rep.pass = rep.max_rate_analytic <= rep.tolerance &&
               rep.max_rate_fd <= rep.tolerance;
    return rep;
}

} // namespace hivdyn
