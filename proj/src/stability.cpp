#include "hivdyn/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hivdyn {

namespace {

constexpr double kMarginalBand = 1e-12;

enum class Sign { Positive, Marginal, Negative };

// A strict inequality x > 0 holds only beyond 1e-12 of the condition's scale;
// values inside the band are treated as marginal.
Sign strict_sign(double x, double scale) {
    const double tol = kMarginalBand * scale;
    if (x > tol) return Sign::Positive;
    if (x < -tol) return Sign::Negative;
    return Sign::Marginal;
}

Verdict fold_verdict(const std::vector<Sign>& signs) {
    bool marginal = false;
    bool negative = false;
    for (Sign s : signs) {
        marginal |= (s == Sign::Marginal);
        negative |= (s == Sign::Negative);
    }
    if (marginal) return Verdict::Marginal;
    return negative ? Verdict::Unstable : Verdict::LocallyStable;
}

struct ScaledTerms {
    // Effective infection pressure Np * kp * lambda * d_I / d_T.
    double B;
    double s; // d_L + alpha
};

ScaledTerms scaled_terms(const LatentParams& lp, const Efficacy& eff) {
    const CoreParams& c = lp.core;
    const double kp = c.k * (1.0 - eff.eps_RT);
    const double Np = c.N * (1.0 - eff.eps_PI);
    return {Np * kp * c.lambda * c.d_I / c.d_T, lp.d_L + lp.alpha};
}

} // namespace

Jacobian jacobian_3cm(const CoreParams& core, const Efficacy& eff,
                      const State3& at) {
    if (!(std::isfinite(at.T) && std::isfinite(at.I) && std::isfinite(at.V)))
        throw InvalidStateError("jacobian_3cm: non-finite state");
    const double kp = core.k * (1.0 - eff.eps_RT);
    const double Np = core.N * (1.0 - eff.eps_PI);
    Jacobian j(3, 3);
    j << -core.d_T - kp * at.V, 0.0, -kp * at.T,
         kp * at.V, -core.d_I, kp * at.T,
         0.0, Np * core.d_I, -core.d_V;
    return j;
}

Jacobian jacobian_4cm(const LatentParams& lp, const Efficacy& eff,
                      const State4& at) {
    if (!(std::isfinite(at.T) && std::isfinite(at.I) && std::isfinite(at.L) &&
          std::isfinite(at.V)))
        throw InvalidStateError("jacobian_4cm: non-finite state");
    const CoreParams& c = lp.core;
    const double kp = c.k * (1.0 - eff.eps_RT);
    const double Np = c.N * (1.0 - eff.eps_PI);
    Jacobian j(4, 4);
    j << -c.d_T - kp * at.V, 0.0, 0.0, -kp * at.T,
         (1.0 - lp.p) * kp * at.V, -c.d_I, lp.alpha, (1.0 - lp.p) * kp * at.T,
         lp.p * kp * at.V, 0.0, -(lp.d_L + lp.alpha), lp.p * kp * at.T,
         0.0, Np * c.d_I, 0.0, -c.d_V;
    return j;
}

CharCoeffsCubic char_coeffs_noninfective(const LatentParams& lp,
                                         const Efficacy& eff) {
    const CoreParams& c = lp.core;
    const auto [B, s] = scaled_terms(lp, eff);
    const double R = r_l(lp, eff);
    CharCoeffsCubic out;
    out.A1 = c.d_V + c.d_I + lp.d_L + lp.alpha;
    out.A2 = c.d_I * c.d_V + s * (c.d_I + c.d_V) - (1.0 - lp.p) * B;
    // Product form keeps sign(A3) = sign(1 - R_L) exact.
    out.A3 = s * c.d_I * c.d_V * (1.0 - R);
    return out;
}

CharCoeffsQuartic char_coeffs_endemic(const LatentParams& lp,
                                      const Efficacy& eff) {
    const double R = r_l(lp, eff);
    if (!(R > 1.0))
        throw EndemicAbsentError(
            "char_coeffs_endemic: no endemic equilibrium (R_L <= 1)");
    const CoreParams& c = lp.core;
    const auto [B, s] = scaled_terms(lp, eff);
    const double G = B / R;
    CharCoeffsQuartic out;
    out.A1 = c.d_T * R + c.d_V + c.d_I + s;
    out.A2 = c.d_T * R * (s + c.d_I + c.d_V) + s * (c.d_I + c.d_V) +
             c.d_I * c.d_V - (1.0 - lp.p) * G;
    out.A3 = c.d_T * R * (s * (c.d_I + c.d_V) + c.d_I * c.d_V) +
             s * c.d_I * c.d_V -
             G * ((1.0 - lp.p) * c.d_T + (1.0 - lp.p) * lp.d_L + lp.alpha);
    out.A4 = c.d_T * s * c.d_I * c.d_V * (R - 1.0);
    return out;
}

double EigenSpectrum::max_real_part() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eigenvalues) m = std::max(m, ev.real());
    return m;
}

namespace {

// Parlett-Reinsch balancing: a diagonal similarity with power-of-two entries
// that equalizes row and column norms.  The model Jacobians mix entries
// spanning ten orders of magnitude, so this step decides whether the QR
// eigenvalues are accurate to 1e-9 in the small coefficients.
Eigen::VectorXd balance_in_place(Jacobian& a) {
    const Eigen::Index n = a.rows();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (k == i) continue;
                c += std::abs(a(k, i));
                r += std::abs(a(i, k));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c >= r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r < 0.95 * s && f != 1.0) {
                converged = false;
                scale[i] *= f;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return scale;
}

} // namespace

EigenSpectrum eigen_spectrum(const Jacobian& j) {
    if (j.rows() != j.cols())
        throw DomainError("eigen_spectrum: matrix must be square");
    if (!j.allFinite())
        throw InvalidStateError("eigen_spectrum: non-finite matrix entry");

    Jacobian balanced = j;
    const Eigen::VectorXd scale = balance_in_place(balanced);
    Eigen::EigenSolver<Jacobian> solver(balanced,
                                        /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigen_spectrum: QR iteration failed to converge");

    const double jnorm = j.norm();
    const auto values = solver.eigenvalues();
    const auto vectors = solver.eigenvectors();
    EigenSpectrum out;
    out.eigenvalues.reserve(static_cast<std::size_t>(values.size()));
    const Eigen::MatrixXcd jc = j.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        // undo the balancing similarity before the residual check
        Eigen::VectorXcd v = vectors.col(i);
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] *= scale[k];
        const double residual = (jc * v - values[i] * v).norm() / v.norm();
        if (residual > 1e-8 * std::max(jnorm, 1e-300))
            throw NumericError("eigen_spectrum: eigenpair residual too large");
        out.eigenvalues.push_back(values[i]);
    }
    return out;
}

bool StabilityReport::all_conditions_hold() const {
    const auto holds = [](bool b) { return b; };
    return std::all_of(coefficients_positive.begin(),
                       coefficients_positive.end(), holds) &&
           std::all_of(composites_positive.begin(), composites_positive.end(),
                       holds);
}

StabilityReport routh_hurwitz_cubic(const CharCoeffsCubic& c) {
    const double coeff_scale =
        std::max({std::abs(c.A1), std::abs(c.A2), std::abs(c.A3)});
    std::vector<Sign> signs = {strict_sign(c.A1, coeff_scale),
                               strict_sign(c.A2, coeff_scale),
                               strict_sign(c.A3, coeff_scale)};
    const double comp = c.A1 * c.A2 - c.A3;
    signs.push_back(
        strict_sign(comp, std::max(std::abs(c.A1 * c.A2), std::abs(c.A3))));

    StabilityReport report;
    for (int i = 0; i < 3; ++i)
        report.coefficients_positive.push_back(signs[i] == Sign::Positive);
    report.composites_positive.push_back(signs[3] == Sign::Positive);
    report.verdict = fold_verdict(signs);
    return report;
}

StabilityReport routh_hurwitz_quartic(const CharCoeffsQuartic& c) {
    const double coeff_scale = std::max(
        {std::abs(c.A1), std::abs(c.A2), std::abs(c.A3), std::abs(c.A4)});
    std::vector<Sign> signs = {strict_sign(c.A1, coeff_scale),
                               strict_sign(c.A2, coeff_scale),
                               strict_sign(c.A3, coeff_scale),
                               strict_sign(c.A4, coeff_scale)};
    const double comp1 = c.A1 * c.A2 - c.A3;
    signs.push_back(
        strict_sign(comp1, std::max(std::abs(c.A1 * c.A2), std::abs(c.A3))));
    const double comp2 = c.A3 * comp1 - c.A4 * c.A1 * c.A1;
    signs.push_back(strict_sign(
        comp2, std::max(std::abs(c.A3 * comp1), std::abs(c.A4 * c.A1 * c.A1))));

    StabilityReport report;
    for (int i = 0; i < 4; ++i)
        report.coefficients_positive.push_back(signs[i] == Sign::Positive);
    report.composites_positive.push_back(signs[4] == Sign::Positive);
    report.composites_positive.push_back(signs[5] == Sign::Positive);
    report.verdict = fold_verdict(signs);
    return report;
}

Verdict classify_spectrum(const EigenSpectrum& spectrum, double scale) {
    const double tol = 1e-9 * std::max(scale, 1e-300);
    const double m = spectrum.max_real_part();
    if (m < -tol) return Verdict::LocallyStable;
    if (m > tol) return Verdict::Unstable;
    return Verdict::Marginal;
}

StabilityReport classify_equilibrium(const LatentParams& lp,
                                     const Efficacy& eff,
                                     EquilibriumKind which) {
    const double R = r_l(lp, eff);
    const bool marginal = std::abs(R - 1.0) <= kMarginalBand;

    if (which == EquilibriumKind::Endemic) {
        if (marginal) {
            StabilityReport report;
            report.verdict = Verdict::Marginal;
            return report;
        }
        if (R < 1.0)
            throw EndemicAbsentError(
                "classify_equilibrium: no endemic equilibrium (R_L <= 1)");

        StabilityReport report = routh_hurwitz_quartic(char_coeffs_endemic(lp, eff));
        const auto eqs = equilibria_4cm(lp, eff);
        const Jacobian j = jacobian_4cm(lp, eff, eqs.at(1).state);
        EigenSpectrum spec = eigen_spectrum(j);
        double radius = 0.0;
        for (const auto& ev : spec.eigenvalues)
            radius = std::max(radius, std::abs(ev));
        const Verdict numeric = classify_spectrum(spec, radius);
        if (numeric != report.verdict)
            throw VerdictMismatchError(
                "classify_equilibrium: closed-form and numeric verdicts "
                "disagree at the endemic equilibrium");
        report.spectrum = std::move(spec);
        return report;
    }

    StabilityReport report = routh_hurwitz_cubic(char_coeffs_noninfective(lp, eff));
    const State4 eni{lp.core.lambda / lp.core.d_T, 0.0, 0.0, 0.0};
    const Jacobian j = jacobian_4cm(lp, eff, eni);
    EigenSpectrum spec = eigen_spectrum(j);

    // Split off the factored root eta = -d_T before the numeric verdict.
    double radius = 0.0;
    for (const auto& ev : spec.eigenvalues)
        radius = std::max(radius, std::abs(ev));
    std::size_t root_idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
        const double d = std::abs(spec.eigenvalues[i] + lp.core.d_T);
        if (d < best) {
            best = d;
            root_idx = i;
        }
    }
    if (best > 1e-9 * std::max(radius, lp.core.d_T))
        throw NumericError(
            "classify_equilibrium: factored root -d_T not present in the "
            "computed spectrum");
    EigenSpectrum quotient;
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
        if (i != root_idx) quotient.eigenvalues.push_back(spec.eigenvalues[i]);

    report.factored_root = -lp.core.d_T;
    if (marginal) {
        report.verdict = Verdict::Marginal;
        report.spectrum = std::move(spec);
        return report;
    }
    const Verdict numeric = classify_spectrum(quotient, radius);
    if (numeric != report.verdict)
        throw VerdictMismatchError(
            "classify_equilibrium: closed-form and numeric verdicts disagree "
            "at the non-infective equilibrium");
    report.spectrum = std::move(spec);
    return report;
}

} // namespace hivdyn
