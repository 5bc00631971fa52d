#include "hivdyn/model.hpp"

#include <cmath>

namespace hivdyn {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw DomainError(msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void CoreParams::validate() const {
    require(finite(lambda) && lambda > 0, "lambda must be positive");
    require(finite(d_T) && d_T > 0, "d_T must be positive");
    require(finite(d_I) && d_I > 0, "d_I must be positive");
    require(finite(d_V) && d_V > 0, "d_V must be positive");
    require(finite(k) && k > 0, "k must be positive");
    require(finite(N) && N >= 1, "N must be at least 1");
}

void LatentParams::validate() const {
    core.validate();
    require(finite(p) && p >= 0 && p < 1, "p must lie in [0, 1)");
    require(finite(alpha) && alpha >= 0, "alpha must be nonnegative");
    require(finite(d_L) && d_L >= 0, "d_L must be nonnegative");
    require(alpha + d_L > 0, "alpha + d_L must be positive");
}

void Efficacy::validate() const {
    require(finite(eps_RT) && eps_RT >= 0 && eps_RT <= 1,
            "eps_RT must lie in [0, 1]");
    require(finite(eps_PI) && eps_PI >= 0 && eps_PI <= 1,
            "eps_PI must lie in [0, 1]");
}

double combined_efficacy(const Efficacy& eff) {
    return eff.eps_RT + eff.eps_PI - eff.eps_RT * eff.eps_PI;
}

CoreParams effective_params(const CoreParams& core, const Efficacy& eff) {
    CoreParams out = core;
    out.k = core.k * (1.0 - eff.eps_RT);
    out.N = core.N * (1.0 - eff.eps_PI);
    return out;
}

State3 rhs_3cm(const CoreParams& core, const Efficacy& eff, const State3& s) {
    if (!(finite(s.T) && finite(s.I) && finite(s.V)))
        throw InvalidStateError("rhs_3cm: non-finite state component");
    const double kp = core.k * (1.0 - eff.eps_RT);
    const double Np = core.N * (1.0 - eff.eps_PI);
    const double infection = kp * s.T * s.V;
    return {core.lambda - core.d_T * s.T - infection,
            infection - core.d_I * s.I,
            Np * core.d_I * s.I - core.d_V * s.V};
}

State4 rhs_4cm(const LatentParams& lp, const Efficacy& eff, const State4& s) {
    if (!(finite(s.T) && finite(s.I) && finite(s.L) && finite(s.V)))
        throw InvalidStateError("rhs_4cm: non-finite state component");
    const CoreParams& c = lp.core;
    const double kp = c.k * (1.0 - eff.eps_RT);
    const double Np = c.N * (1.0 - eff.eps_PI);
    const double infection = kp * s.T * s.V;
    return {c.lambda - c.d_T * s.T - infection,
            (1.0 - lp.p) * infection + lp.alpha * s.L - c.d_I * s.I,
            lp.p * infection - (lp.alpha + lp.d_L) * s.L,
            Np * c.d_I * s.I - c.d_V * s.V};
}

RhsFn make_rhs_3cm(const CoreParams& core, const Efficacy& eff) {
    return [core, eff](double, std::span<const double> y,
                       std::span<double> dydt) {
        const State3 d = rhs_3cm(core, eff, {y[0], y[1], y[2]});
        dydt[0] = d.T;
        dydt[1] = d.I;
        dydt[2] = d.V;
    };
}

RhsFn make_rhs_4cm(const LatentParams& lp, const Efficacy& eff) {
    return [lp, eff](double, std::span<const double> y,
                     std::span<double> dydt) {
        const State4 d = rhs_4cm(lp, eff, {y[0], y[1], y[2], y[3]});
        dydt[0] = d.T;
        dydt[1] = d.I;
        dydt[2] = d.L;
        dydt[3] = d.V;
    };
}

} // namespace hivdyn
