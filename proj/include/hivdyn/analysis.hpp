#pragma once

#include <vector>

#include "hivdyn/model.hpp"

namespace hivdyn {

enum class EquilibriumKind { NonInfective, Endemic };

struct Equilibrium3 {
    State3 state;
    EquilibriumKind kind;
};

struct Equilibrium4 {
    State4 state;
    EquilibriumKind kind;
};

/// Partial derivatives of the treated endemic viral setpoint with respect to
/// the two drug efficacies.  Both are nonpositive for admissible inputs.
struct SetpointSensitivity {
    double dV_dEpsRT;
    double dV_dEpsPI;
};

/// Basic reproduction number of the (treated) three-component model:
/// k N (1 - eps) lambda / (d_T d_V).
double r0(const CoreParams& core, const Efficacy& eff = {});

/// Basic reproduction number of the (treated) latent model:
/// r0 * ((1 - p) d_L + alpha) / (d_L + alpha).
double r_l(const LatentParams& lp, const Efficacy& eff = {});

/// Ratio Q = R_L / R_0 = ((1 - p) d_L + alpha) / (d_L + alpha).
/// Strictly below 1 whenever p > 0 and d_L > 0; independent of therapy.
double q_ratio(const LatentParams& lp);

/// All equilibria of the treated three-component model.  The non-infective
/// state (lambda/d_T, 0, 0) is always present; the endemic state is included
/// only when the treated reproduction number exceeds 1 (strictly, beyond a
/// 1e-12 coincidence band).
std::vector<Equilibrium3> equilibria_3cm(const CoreParams& core,
                                         const Efficacy& eff = {});

std::vector<Equilibrium4> equilibria_4cm(const LatentParams& lp,
                                         const Efficacy& eff = {});

/// Treated endemic viral steady state
/// V-bar = (d_T R_L / k)(1 - eps_PI) - d_T / (k (1 - eps_RT)),
/// where R_L is the untreated reproduction number.
double viral_setpoint(const LatentParams& lp, const Efficacy& eff);

/// Closed-form partial derivatives of viral_setpoint.
/// Throws DomainError at the eps_RT = 1 singularity.
SetpointSensitivity setpoint_sensitivity(const LatentParams& lp,
                                         const Efficacy& eff);

} // namespace hivdyn
