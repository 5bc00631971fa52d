#pragma once

#include "hivdyn/analysis.hpp"
#include "hivdyn/integrator.hpp"

namespace hivdyn {

/// Lyapunov function for the non-infective equilibrium of the latent model:
///   ((1-p) d_L + alpha) [T - T0 - T0 ln(T/T0)]
///     + (d_L + alpha) [I + V / N'] + alpha L
/// with T0 = lambda / d_T and N' = N (1 - eps_PI).  Nonnegative, zero exactly
/// at the equilibrium.  Negative I, L, V within solver undershoot are treated
/// as zero; T <= 0 throws DomainError.
double u_noninfective(const LatentParams& lp, const Efficacy& eff,
                      const State4& s);

/// Closed-form derivative of u_noninfective along trajectories:
///   -((1-p) d_L + alpha) (lambda - d_T T)^2 / (d_T T)
///     + (d_L + alpha) (d_V / N') (R_L - 1) V
/// with the treated reproduction number.  Nonpositive whenever R_L <= 1.
double u_noninfective_rate(const LatentParams& lp, const Efficacy& eff,
                           const State4& s);

/// Lyapunov function for the endemic equilibrium: the weighted sum of the
/// four x - x* - x* ln(x/x*) barriers.  Requires strictly positive state
/// components (above 1e-300) and a treated reproduction number above 1.
double u_endemic(const LatentParams& lp, const Efficacy& eff, const State4& s);

/// Closed-form derivative of u_endemic along trajectories, decomposed into
/// the three mean-inequality brackets; nonpositive on the positive orthant.
double u_endemic_rate(const LatentParams& lp, const Efficacy& eff,
                      const State4& s);

struct DescentReport {
    double max_rate_analytic; ///< max of the closed-form rate over samples
    double max_rate_fd;       ///< max finite-difference slope of U
    double u_max;             ///< max |U| over samples
    double u_initial;
    double u_final;
    double tolerance; ///< 1e-6 * u_max per day
    std::size_t samples;
    bool pass;
};

/// Checks that U is non-increasing along a simulated trajectory, both through
/// the analytic rate and through finite differences of the sampled U values.
/// Samples whose logged components are nonpositive (the t = 0 sample of a
/// zero-seeded run, in endemic mode) are skipped.
DescentReport verify_descent(const LatentParams& lp, const Efficacy& eff,
                             const Trajectory& traj, EquilibriumKind which);

} // namespace hivdyn
