#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "hivdyn/stability.hpp"
#include "test_common.hpp"

using namespace hivdyn;
using testutil::rel_err;

namespace {

// Central-difference Jacobian; the vector fields are at most bilinear, so the
// result is exact up to rounding.
Jacobian fd_jacobian_4cm(const LatentParams& lp, const Efficacy& eff,
                         const State4& at) {
    Jacobian j(4, 4);
    const double base[4] = {at.T, at.I, at.L, at.V};
    for (int col = 0; col < 4; ++col) {
        const double h = 1e-4 * std::max(std::abs(base[col]), 1.0);
        double plus[4], minus[4];
        std::copy(base, base + 4, plus);
        std::copy(base, base + 4, minus);
        plus[col] += h;
        minus[col] -= h;
        const State4 dp = rhs_4cm(lp, eff, {plus[0], plus[1], plus[2], plus[3]});
        const State4 dm =
            rhs_4cm(lp, eff, {minus[0], minus[1], minus[2], minus[3]});
        const double dpv[4] = {dp.T, dp.I, dp.L, dp.V};
        const double dmv[4] = {dm.T, dm.I, dm.L, dm.V};
        for (int row = 0; row < 4; ++row)
            j(row, col) = (dpv[row] - dmv[row]) / (2 * h);
    }
    return j;
}

Jacobian fd_jacobian_3cm(const CoreParams& core, const Efficacy& eff,
                         const State3& at) {
    Jacobian j(3, 3);
    const double base[3] = {at.T, at.I, at.V};
    for (int col = 0; col < 3; ++col) {
        const double h = 1e-4 * std::max(std::abs(base[col]), 1.0);
        double plus[3], minus[3];
        std::copy(base, base + 3, plus);
        std::copy(base, base + 3, minus);
        plus[col] += h;
        minus[col] -= h;
        const State3 dp = rhs_3cm(core, eff, {plus[0], plus[1], plus[2]});
        const State3 dm = rhs_3cm(core, eff, {minus[0], minus[1], minus[2]});
        const double dpv[3] = {dp.T, dp.I, dp.V};
        const double dmv[3] = {dm.T, dm.I, dm.V};
        for (int row = 0; row < 3; ++row)
            j(row, col) = (dpv[row] - dmv[row]) / (2 * h);
    }
    return j;
}

State4 non_infective_point(const LatentParams& lp) {
    return {lp.core.lambda / lp.core.d_T, 0.0, 0.0, 0.0};
}

// Elementary symmetric polynomials of the eigenvalues give the monic
// characteristic coefficients; imaginary parts cancel for real matrices.
std::vector<double> coeffs_from_spectrum(
    const std::vector<std::complex<double>>& ev) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& root : ev) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] * root;
        }
        poly = std::move(next);
    }
    std::vector<double> out;
    for (std::size_t i = 1; i < poly.size(); ++i)
        out.push_back(poly[i].real());
    return out; // {A1, A2, ...}
}

std::vector<std::complex<double>> drop_factored_root(
    const std::vector<std::complex<double>>& ev, double d_T) {
    std::size_t idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const double d = std::abs(ev[i] + d_T);
        if (d < best) {
            best = d;
            idx = i;
        }
    }
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (i != idx) out.push_back(ev[i]);
    return out;
}

} // namespace

TEST_CASE("jacobian entries at the non-infective equilibrium") {
    const LatentParams lp = preset_table1();
    const Jacobian j = jacobian_4cm(lp, {}, non_infective_point(lp));
    CHECK(j(0, 3) == doctest::Approx(-2.4e-2).epsilon(1e-12));
    CHECK(j(3, 1) == doctest::Approx(2000.0).epsilon(1e-14));
    CHECK(j(1, 2) == doctest::Approx(lp.alpha).epsilon(1e-14));

    const Jacobian j3 =
        jacobian_3cm(lp.core, {}, {lp.core.lambda / lp.core.d_T, 0.0, 0.0});
    CHECK(j3(2, 1) == doctest::Approx(2000.0).epsilon(1e-14));
}

TEST_CASE("jacobians match central differences at random states") {
    std::mt19937_64 rng(201);
    for (int i = 0; i < 100; ++i) {
        const LatentParams lp = testutil::random_params(rng);
        const Efficacy eff{testutil::log_uniform(rng, 1e-4, 0.999), 0.0};
        const State4 s = testutil::random_state(rng, 1.0, 1e6);
        const Jacobian a = jacobian_4cm(lp, eff, s);
        const Jacobian f = fd_jacobian_4cm(lp, eff, s);
        const double scale = a.cwiseAbs().maxCoeff();
        CHECK((a - f).cwiseAbs().maxCoeff() <= 1e-5 * scale);

        const Jacobian a3 = jacobian_3cm(lp.core, eff, {s.T, s.I, s.V});
        const Jacobian f3 = fd_jacobian_3cm(lp.core, eff, {s.T, s.I, s.V});
        CHECK((a3 - f3).cwiseAbs().maxCoeff() <=
              1e-5 * a3.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("cubic coefficients at the non-infective equilibrium") {
    const LatentParams lp = preset_table1();
    const CharCoeffsCubic c = char_coeffs_noninfective(lp);
    CHECK(c.A1 == doctest::Approx(24.014).epsilon(1e-12));
    CHECK(c.A3 < 0.0); // R_L > 1 for the reference parameters
    CHECK(c.A3 == doctest::Approx((lp.d_L + lp.alpha) * lp.core.d_I *
                                  lp.core.d_V * (1.0 - r_l(lp)))
                      .epsilon(1e-14));

    SUBCASE("marginal therapy zeroes A3") {
        const double eps = 1.0 - 1.0 / r_l(lp);
        const CharCoeffsCubic cm = char_coeffs_noninfective(lp, {0.0, eps});
        CHECK(std::abs(cm.A3) <=
              1e-12 * (lp.d_L + lp.alpha) * lp.core.d_I * lp.core.d_V);
    }
}

TEST_CASE("quartic coefficients at the endemic equilibrium") {
    const LatentParams lp = preset_table1();
    const CharCoeffsQuartic c = char_coeffs_endemic(lp);
    CHECK(rel_err(c.A4, 3.307e-3) <= 1e-3);
    CHECK(rel_err(c.A1, 24.034) <= 1e-4);
    CHECK(c.A4 == doctest::Approx(lp.core.d_T * (lp.d_L + lp.alpha) *
                                  lp.core.d_I * lp.core.d_V *
                                  (r_l(lp) - 1.0))
                      .epsilon(1e-14));
    CHECK_THROWS_AS(char_coeffs_endemic(lp, {0.0, 0.519}),
                    EndemicAbsentError);
}

TEST_CASE("coefficients agree with spectra of the assembled jacobians") {
    std::mt19937_64 rng(202);
    int quartic_checked = 0;
    for (int i = 0; i < 50; ++i) {
        const LatentParams lp =
            i == 0 ? preset_table1() : testutil::random_params(rng);
        const CharCoeffsCubic c = char_coeffs_noninfective(lp);
        const EigenSpectrum spec =
            eigen_spectrum(jacobian_4cm(lp, {}, non_infective_point(lp)));
        const auto quotient =
            drop_factored_root(spec.eigenvalues, lp.core.d_T);
        const auto rec = coeffs_from_spectrum(quotient);
        REQUIRE(rec.size() == 3);
        CHECK(rel_err(rec[0], c.A1) <= 1e-9);
        CHECK(rel_err(rec[1], c.A2) <= 1e-9);
        CHECK(rel_err(rec[2], c.A3) <= 1e-9);

        if (r_l(lp) > 1.0) {
            ++quartic_checked;
            const CharCoeffsQuartic q = char_coeffs_endemic(lp);
            const auto eqs = equilibria_4cm(lp);
            const EigenSpectrum es =
                eigen_spectrum(jacobian_4cm(lp, {}, eqs[1].state));
            const auto qc = coeffs_from_spectrum(es.eigenvalues);
            REQUIRE(qc.size() == 4);
            CHECK(rel_err(qc[0], q.A1) <= 1e-9);
            CHECK(rel_err(qc[1], q.A2) <= 1e-9);
            CHECK(rel_err(qc[2], q.A3) <= 1e-9);
            CHECK(rel_err(qc[3], q.A4) <= 1e-9);
        }
    }
    CHECK(quartic_checked > 5);
}

TEST_CASE("routh-hurwitz on pinned coefficient sets") {
    SUBCASE("(eta+1)^3") {
        const StabilityReport r = routh_hurwitz_cubic({3.0, 3.0, 1.0});
        CHECK(r.verdict == Verdict::LocallyStable);
        CHECK(r.all_conditions_hold());
    }
    SUBCASE("(eta+1)^4") {
        const StabilityReport r = routh_hurwitz_quartic({4.0, 6.0, 4.0, 1.0});
        CHECK(r.verdict == Verdict::LocallyStable);
        CHECK(r.all_conditions_hold());
    }
    SUBCASE("reference parameters fail at the non-infective state") {
        const StabilityReport r =
            routh_hurwitz_cubic(char_coeffs_noninfective(preset_table1()));
        CHECK(r.verdict == Verdict::Unstable);
        CHECK_FALSE(r.coefficients_positive[2]); // A3 < 0
    }
    SUBCASE("suppressive therapy stabilizes the non-infective state") {
        const StabilityReport r = routh_hurwitz_cubic(
            char_coeffs_noninfective(preset_table1(), {0.0, 0.6}));
        CHECK(r.verdict == Verdict::LocallyStable);
    }
    SUBCASE("untreated endemic state is stable") {
        const StabilityReport r =
            routh_hurwitz_quartic(char_coeffs_endemic(preset_table1()));
        CHECK(r.verdict == Verdict::LocallyStable);
    }
    SUBCASE("negative A4 fails positivity") {
        const StabilityReport r =
            routh_hurwitz_quartic({4.0, 6.0, 4.0, -1.0});
        CHECK(r.verdict == Verdict::Unstable);
        CHECK_FALSE(r.coefficients_positive[3]);
    }
}

TEST_CASE("eigen spectrum") {
    SUBCASE("diagonal matrix") {
        Jacobian d = Jacobian::Zero(4, 4);
        d.diagonal() << -1.0, -2.0, -3.0, -4.0;
        const EigenSpectrum spec = eigen_spectrum(d);
        std::vector<double> re;
        for (const auto& ev : spec.eigenvalues) {
            re.push_back(ev.real());
            CHECK(std::abs(ev.imag()) <= 1e-12);
        }
        std::sort(re.begin(), re.end());
        CHECK(re[0] == doctest::Approx(-4.0));
        CHECK(re[3] == doctest::Approx(-1.0));
    }
    SUBCASE("saddle structure at the non-infective equilibrium") {
        const LatentParams lp = preset_table1();
        const EigenSpectrum spec =
            eigen_spectrum(jacobian_4cm(lp, {}, non_infective_point(lp)));
        int positive = 0;
        double closest = 1e300;
        for (const auto& ev : spec.eigenvalues) {
            if (ev.real() > 0) ++positive;
            closest = std::min(closest, std::abs(ev + lp.core.d_T));
        }
        CHECK(positive == 1);
        CHECK(closest <= 1e-9);
    }
    SUBCASE("conjugate symmetry and trace identity") {
        std::mt19937_64 rng(203);
        for (int i = 0; i < 50; ++i) {
            const LatentParams lp = testutil::random_params(rng);
            const State4 s = testutil::random_state(rng, 1.0, 1e6);
            const Jacobian j = jacobian_4cm(lp, {}, s);
            const EigenSpectrum spec = eigen_spectrum(j);
            std::complex<double> sum = 0.0;
            double radius = 0.0;
            for (const auto& ev : spec.eigenvalues) {
                sum += ev;
                radius = std::max(radius, std::abs(ev));
                if (std::abs(ev.imag()) > 1e-9 * radius) {
                    // conjugate partner must be present
                    bool found = false;
                    for (const auto& other : spec.eigenvalues)
                        if (std::abs(other - std::conj(ev)) <= 1e-9 * radius)
                            found = true;
                    CHECK(found);
                }
            }
            CHECK(std::abs(sum.imag()) <= 1e-9 * radius);
            CHECK(rel_err(sum.real(), j.trace()) <= 1e-9);
        }
    }
    SUBCASE("rejects non-square and non-finite input") {
        CHECK_THROWS_AS(eigen_spectrum(Jacobian::Zero(2, 3)), DomainError);
        Jacobian bad = Jacobian::Zero(2, 2);
        bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(eigen_spectrum(bad), InvalidStateError);
    }
}

TEST_CASE("classify_equilibrium on the reference parameters") {
    const LatentParams lp = preset_table1();
    SUBCASE("untreated: E_NI is an unstable saddle, E_I locally stable") {
        const StabilityReport ni =
            classify_equilibrium(lp, {}, EquilibriumKind::NonInfective);
        CHECK(ni.verdict == Verdict::Unstable);
        REQUIRE(ni.factored_root.has_value());
        CHECK(*ni.factored_root == -lp.core.d_T);
        REQUIRE(ni.spectrum.has_value());
        CHECK(ni.spectrum->eigenvalues.size() == 4);

        const StabilityReport en =
            classify_equilibrium(lp, {}, EquilibriumKind::Endemic);
        CHECK(en.verdict == Verdict::LocallyStable);
        CHECK(en.spectrum->max_real_part() < 0.0);
    }
    SUBCASE("marginal therapy reports Marginal") {
        const double eps = 1.0 - 1.0 / r_l(lp);
        CHECK(std::abs(r_l(lp, {0.0, eps}) - 1.0) <= 1e-13);
        const StabilityReport ni =
            classify_equilibrium(lp, {0.0, eps}, EquilibriumKind::NonInfective);
        CHECK(ni.verdict == Verdict::Marginal);
    }
    SUBCASE("endemic absent under suppressive therapy") {
        CHECK_THROWS_AS(
            classify_equilibrium(lp, {0.0, 0.6}, EquilibriumKind::Endemic),
            EndemicAbsentError);
    }
}

TEST_CASE("stability property sweep over random parameters") {
    std::mt19937_64 rng(204);
    int below = 0, above = 0;
    for (int i = 0; i < 300; ++i) {
        const LatentParams lp = testutil::random_params(rng);
        const double RL = r_l(lp);
        const CharCoeffsCubic c = char_coeffs_noninfective(lp);

        // sign(A3) = sign(1 - R_L), exactly
        CHECK(std::signbit(c.A3) == std::signbit(1.0 - RL));

        const EigenSpectrum ni_spec =
            eigen_spectrum(jacobian_4cm(lp, {}, non_infective_point(lp)));
        if (RL < 1.0) {
            ++below;
            const StabilityReport r = routh_hurwitz_cubic(c);
            CHECK(r.verdict == Verdict::LocallyStable);
            CHECK(ni_spec.max_real_part() < 0.0);
            CHECK(classify_equilibrium(lp, {}, EquilibriumKind::NonInfective)
                      .verdict == Verdict::LocallyStable);
        } else if (RL > 1.0) {
            ++above;
            int positive = 0;
            for (const auto& ev : ni_spec.eigenvalues)
                if (ev.real() > 0) ++positive;
            CHECK(positive == 1);

            const StabilityReport r =
                routh_hurwitz_quartic(char_coeffs_endemic(lp));
            CHECK(r.verdict == Verdict::LocallyStable);
            const auto eqs = equilibria_4cm(lp);
            const EigenSpectrum ei_spec =
                eigen_spectrum(jacobian_4cm(lp, {}, eqs[1].state));
            CHECK(ei_spec.max_real_part() < 0.0);
            CHECK(classify_equilibrium(lp, {}, EquilibriumKind::Endemic)
                      .verdict == Verdict::LocallyStable);
        }
    }
    // the draw range must exercise both regimes
    CHECK(below > 30);
    CHECK(above > 30);
}
