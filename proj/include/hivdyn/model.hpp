#pragma once

#include <functional>
#include <span>

#include "hivdyn/errors.hpp"

namespace hivdyn {

/// Rate constants shared by both model variants.
/// Units: densities are per ml, time is measured in days.
struct CoreParams {
    double lambda; ///< recruitment rate of susceptible cells, cells ml^-1 day^-1
    double d_T;    ///< death rate of susceptible cells, day^-1
    double d_I;    ///< death rate of productively infected cells, day^-1
    double d_V;    ///< clearance rate of free virions, day^-1
    double k;      ///< mass-action infection rate, ml day^-1
    double N;      ///< burst size, virions produced per infected cell

    /// Throws DomainError unless all rates are positive and N >= 1.
    void validate() const;
};

/// Adds the latent-compartment constants to CoreParams.
struct LatentParams {
    CoreParams core;
    double p;     ///< fraction of new infections that become latent, in [0, 1)
    double alpha; ///< activation rate of latent cells, day^-1
    double d_L;   ///< death rate of latent cells, day^-1

    /// Throws DomainError unless core is valid, 0 <= p < 1, alpha >= 0,
    /// d_L >= 0 and alpha + d_L > 0.  p = 0 is admitted as the degenerate
    /// reduction to the three-component model.
    void validate() const;
};

/// Antiretroviral drug efficacies.  A reverse-transcriptase inhibitor scales
/// the infectivity k by (1 - eps_RT); a protease inhibitor scales the burst
/// size N by (1 - eps_PI).  Zero efficacies recover the untreated models.
struct Efficacy {
    double eps_RT = 0.0;
    double eps_PI = 0.0;

    void validate() const;
};

/// Populations of the three-component model.
struct State3 {
    double T = 0.0; ///< susceptible cells, cells ml^-1
    double I = 0.0; ///< infected cells, cells ml^-1
    double V = 0.0; ///< free virions, virions ml^-1
};

/// Populations of the latent-infection model.
struct State4 {
    double T = 0.0;
    double I = 0.0;
    double L = 0.0; ///< latently infected cells, cells ml^-1
    double V = 0.0;
};

/// Combined efficacy eps with 1 - eps = (1 - eps_RT)(1 - eps_PI).
double combined_efficacy(const Efficacy& eff);

/// Copy of `core` with k <- k(1 - eps_RT) and N <- N(1 - eps_PI).
CoreParams effective_params(const CoreParams& core, const Efficacy& eff);

/// Vector field of the three-component model, therapy folded in.
/// Throws InvalidStateError on non-finite input.
State3 rhs_3cm(const CoreParams& core, const Efficacy& eff, const State3& s);

/// Vector field of the latent-infection model.  The latent compartment is
/// cleared at rate d_L * L, keeping infection bookkeeping consistent with the
/// steady-state equations.
State4 rhs_4cm(const LatentParams& lp, const Efficacy& eff, const State4& s);

/// Generic autonomous vector-field signature used by the integrator.
using RhsFn = std::function<void(double t, std::span<const double> y,
                                 std::span<double> dydt)>;

RhsFn make_rhs_3cm(const CoreParams& core, const Efficacy& eff);
RhsFn make_rhs_4cm(const LatentParams& lp, const Efficacy& eff);

} // namespace hivdyn
