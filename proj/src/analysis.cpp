#include "hivdyn/analysis.hpp"

namespace hivdyn {

namespace {

// Equilibria coincide when |R - 1| falls below this band.
constexpr double kCoincidenceBand = 1e-12;

} // namespace

double r0(const CoreParams& core, const Efficacy& eff) {
    const double eps = combined_efficacy(eff);
    return core.k * core.N * (1.0 - eps) * core.lambda /
           (core.d_T * core.d_V);
}

double q_ratio(const LatentParams& lp) {
    return ((1.0 - lp.p) * lp.d_L + lp.alpha) / (lp.d_L + lp.alpha);
}

double r_l(const LatentParams& lp, const Efficacy& eff) {
    return r0(lp.core, eff) * q_ratio(lp);
}

std::vector<Equilibrium3> equilibria_3cm(const CoreParams& core,
                                         const Efficacy& eff) {
    std::vector<Equilibrium3> out;
    out.push_back({{core.lambda / core.d_T, 0.0, 0.0},
                   EquilibriumKind::NonInfective});
    const double R = r0(core, eff);
    if (R - 1.0 > kCoincidenceBand) {
        const double kp = core.k * (1.0 - eff.eps_RT);
        const double Np = core.N * (1.0 - eff.eps_PI);
        out.push_back({{core.lambda / (core.d_T * R),
                        core.d_T * core.d_V * (R - 1.0) / (kp * Np * core.d_I),
                        core.d_T * (R - 1.0) / kp},
                       EquilibriumKind::Endemic});
    }
    return out;
}

std::vector<Equilibrium4> equilibria_4cm(const LatentParams& lp,
                                         const Efficacy& eff) {
    const CoreParams& c = lp.core;
    std::vector<Equilibrium4> out;
    out.push_back({{c.lambda / c.d_T, 0.0, 0.0, 0.0},
                   EquilibriumKind::NonInfective});
    const double R = r_l(lp, eff);
    if (R - 1.0 > kCoincidenceBand) {
        const double kp = c.k * (1.0 - eff.eps_RT);
        const double Np = c.N * (1.0 - eff.eps_PI);
        out.push_back({{c.lambda / (c.d_T * R),
                        c.d_T * c.d_V * (R - 1.0) / (kp * Np * c.d_I),
                        lp.p * c.lambda * (R - 1.0) / (R * (lp.d_L + lp.alpha)),
                        c.d_T * (R - 1.0) / kp},
                       EquilibriumKind::Endemic});
    }
    return out;
}

double viral_setpoint(const LatentParams& lp, const Efficacy& eff) {
    if (eff.eps_RT >= 1.0)
        throw DomainError("viral_setpoint: eps_RT = 1 is singular");
    const CoreParams& c = lp.core;
    const double RL = r_l(lp); // untreated value, as the setpoint is written
    return c.d_T * RL / c.k * (1.0 - eff.eps_PI) -
           c.d_T / (c.k * (1.0 - eff.eps_RT));
}

SetpointSensitivity setpoint_sensitivity(const LatentParams& lp,
                                         const Efficacy& eff) {
    if (eff.eps_RT >= 1.0)
        throw DomainError("setpoint_sensitivity: eps_RT = 1 is singular");
    const CoreParams& c = lp.core;
    const double om = 1.0 - eff.eps_RT;
    return {-c.d_T / (c.k * om * om), -c.d_T * r_l(lp) / c.k};
}

} // namespace hivdyn
