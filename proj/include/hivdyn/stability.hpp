#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hivdyn/analysis.hpp"

namespace hivdyn {

/// Dense linearization of a model vector field (3x3 or 4x4), units day^-1.
using Jacobian = Eigen::MatrixXd;

Jacobian jacobian_3cm(const CoreParams& core, const Efficacy& eff,
                      const State3& at);
Jacobian jacobian_4cm(const LatentParams& lp, const Efficacy& eff,
                      const State4& at);

/// Coefficients of eta^3 + A1 eta^2 + A2 eta + A3, the characteristic factor
/// of J(E_NI) of the latent model after the (d_T + eta) root is split off.
struct CharCoeffsCubic {
    double A1, A2, A3;
};

/// Coefficients of eta^4 + A1 eta^3 + A2 eta^2 + A3 eta + A4 for J(E_I).
struct CharCoeffsQuartic {
    double A1, A2, A3, A4;
};

CharCoeffsCubic char_coeffs_noninfective(const LatentParams& lp,
                                         const Efficacy& eff = {});

/// Requires the treated reproduction number to exceed 1; throws
/// EndemicAbsentError otherwise.
CharCoeffsQuartic char_coeffs_endemic(const LatentParams& lp,
                                      const Efficacy& eff = {});

struct EigenSpectrum {
    std::vector<std::complex<double>> eigenvalues;

    double max_real_part() const;
};

/// Eigenvalues of a dense real matrix with per-pair residual check
/// ||J v - eta v|| <= 1e-8 ||J||.  Throws NumericError on solver failure.
EigenSpectrum eigen_spectrum(const Jacobian& j);

enum class Verdict { LocallyStable, Unstable, Marginal };

/// Outcome of a Routh-Hurwitz evaluation, optionally augmented with the
/// numeric spectrum cross-check performed by classify_equilibrium.
struct StabilityReport {
    std::vector<bool> coefficients_positive; ///< A1..A3 or A1..A4 > 0
    std::vector<bool> composites_positive;   ///< A1A2-A3 (and the quartic chain)
    Verdict verdict = Verdict::Marginal;
    std::optional<double> factored_root; ///< -d_T when classifying E_NI
    std::optional<EigenSpectrum> spectrum;

    bool all_conditions_hold() const;
};

/// Sign conditions A1, A2, A3 > 0 and A1 A2 - A3 > 0.  A condition value x
/// counts as positive iff x > 1e-12 * scale; |x| within the band yields a
/// Marginal verdict.
StabilityReport routh_hurwitz_cubic(const CharCoeffsCubic& c);

/// Adds the quartic condition A3 (A1 A2 - A3) - A4 A1^2 > 0.
StabilityReport routh_hurwitz_quartic(const CharCoeffsQuartic& c);

/// Combined closed-form and numeric classification of a latent-model
/// equilibrium.  The two verdicts must agree; disagreement throws
/// VerdictMismatchError.  |R_L - 1| <= 1e-12 reports Marginal.
StabilityReport classify_equilibrium(const LatentParams& lp,
                                     const Efficacy& eff,
                                     EquilibriumKind which);

/// Verdict from a spectrum alone (used for the three-component model, whose
/// closed-form coefficients are not tracked).  `scale` sets the zero band.
Verdict classify_spectrum(const EigenSpectrum& spectrum, double scale);

} // namespace hivdyn
