#include <doctest.h>

#include <cmath>
#include <vector>

#include "hivdyn/analysis.hpp"
#include "hivdyn/integrator.hpp"
#include "test_common.hpp"

using namespace hivdyn;
using testutil::rel_err;

namespace {

RhsFn scalar_decay(double rate) {
    return [rate](double, std::span<const double> y, std::span<double> d) {
        d[0] = -rate * y[0];
    };
}

SolverConfig scalar_config() {
    SolverConfig cfg;
    cfg.atol = {1e-13};
    cfg.t_max = 1.0;
    return cfg;
}

State3 reference_initials3() { return {4e5, 0.0, 1e5}; }

} // namespace

TEST_CASE("solver config validation") {
    SolverConfig cfg = SolverConfig::defaults3();
    CHECK_NOTHROW(cfg.validate(3));
    CHECK_THROWS_AS(cfg.validate(4), DomainError); // atol arity mismatch
    cfg = SolverConfig::defaults3();
    cfg.rtol = 0.5;
    CHECK_THROWS_AS(cfg.validate(3), DomainError);
    cfg = SolverConfig::defaults3();
    cfg.rtol = 1e-13;
    CHECK_THROWS_AS(cfg.validate(3), DomainError);
    cfg = SolverConfig::defaults3();
    cfg.atol[1] = 0.0;
    CHECK_THROWS_AS(cfg.validate(3), DomainError);
}

TEST_CASE("scalar exponential decay") {
    const double y0[1] = {1e5};
    const Trajectory traj = integrate(scalar_decay(23.0), y0, scalar_config());
    const double exact = 1e5 * std::exp(-23.0);
    const auto last = traj.state(traj.size() - 1);
    CHECK(traj.t_end() == 1.0);
    CHECK(rel_err(last[0], exact) <= 1e-7); // 10x the relative tolerance

    SUBCASE("downward crossing one time constant before the end") {
        const EventSpec ev{0, 1e5 * std::exp(-22.0),
                           CrossingDirection::Downward};
        const auto tc = first_crossing(traj, ev);
        REQUIRE(tc.has_value());
        CHECK(std::abs(*tc - 22.0 / 23.0) <= 1e-4);
        // re-running on the stored trajectory is deterministic and exact
        const auto tc2 = first_crossing(traj, ev);
        CHECK(*tc2 == *tc);
    }
    SUBCASE("initial state already below the threshold") {
        const EventSpec ev{0, 2e5, CrossingDirection::Downward};
        CHECK(first_crossing(traj, ev) == 0.0);
    }
    SUBCASE("no crossing within the horizon") {
        const EventSpec ev{0, 1e-30 + 1e-31, CrossingDirection::Downward};
        CHECK_FALSE(first_crossing(traj, ev).has_value());
    }
}

TEST_CASE("upward crossing") {
    const double y0[1] = {1.0};
    SolverConfig cfg = scalar_config();
    cfg.t_max = 2.0;
    const RhsFn growth = [](double, std::span<const double> y,
                            std::span<double> d) { d[0] = y[0]; };
    const Trajectory traj = integrate(growth, y0, cfg);
    const auto tc = first_crossing(
        traj, {0, std::exp(1.0), CrossingDirection::Upward});
    REQUIRE(tc.has_value());
    CHECK(std::abs(*tc - 1.0) <= 1e-4);
}

TEST_CASE("input validation") {
    const SolverConfig cfg = scalar_config();
    const double neg[1] = {-1.0};
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), neg, cfg), DomainError);
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), {}, cfg), DomainError);
    const double ok[1] = {1.0};
    const EventSpec bad_thr{0, 0.0, CrossingDirection::Downward};
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), ok, cfg, {&bad_thr, 1}),
                    DomainError);
    const EventSpec bad_comp{3, 1.0, CrossingDirection::Downward};
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), ok, cfg, {&bad_comp, 1}),
                    DomainError);
}

TEST_CASE("zero horizon stores a single sample") {
    SolverConfig cfg = scalar_config();
    cfg.t_max = 0.0;
    const double y0[1] = {5.0};
    const Trajectory traj = integrate(scalar_decay(1.0), y0, cfg);
    CHECK(traj.size() == 1);
    CHECK(traj.state(0)[0] == 5.0);
    CHECK(first_crossing(traj, {0, 10.0, CrossingDirection::Downward}) == 0.0);
}

TEST_CASE("blow-up triggers the stiffness guard") {
    SolverConfig cfg = scalar_config();
    cfg.t_max = 1.0;
    const RhsFn quadratic = [](double, std::span<const double> y,
                               std::span<double> d) { d[0] = y[0] * y[0]; };
    const double y0[1] = {1e8}; // escapes at t ~ 1e-8
    CHECK_THROWS_AS(integrate(quadratic, y0, cfg), StiffnessError);
}

TEST_CASE("three-component run approaches the endemic equilibrium") {
    const CoreParams core = preset_table1().core;
    const auto eqs = equilibria_3cm(core);
    REQUIRE(eqs.size() == 2);
    const State3 ei = eqs[1].state;
    const State3 init = reference_initials3();
    const double y0[3] = {init.T, init.I, init.V};

    SolverConfig cfg = SolverConfig::defaults3();
    cfg.t_max = 800.0;
    const Trajectory traj = integrate(make_rhs_3cm(core, {}), y0, cfg);

    // Damped oscillation: about 4% away at day 400, inside 1% by day 800.
    double at400[3], at800[3];
    traj.evaluate(400.0, at400);
    traj.evaluate(800.0, at800);
    const double expect[3] = {ei.T, ei.I, ei.V};
    for (int i = 0; i < 3; ++i) {
        CHECK(rel_err(at400[i], expect[i]) <= 0.05);
        CHECK(rel_err(at800[i], expect[i]) <= 0.01);
    }
}

TEST_CASE("latent run reaches the endemic equilibrium by day 600") {
    const LatentParams lp = preset_table1();
    const auto eqs = equilibria_4cm(lp);
    REQUIRE(eqs.size() == 2);
    const State4 ei = eqs[1].state;
    const double y0[4] = {4e5, 0.0, 0.0, 1e5};

    SolverConfig cfg = SolverConfig::defaults4();
    cfg.t_max = 600.0;
    const Trajectory traj = integrate(make_rhs_4cm(lp, {}), y0, cfg);
    const auto last = traj.state(traj.size() - 1);
    const double expect[4] = {ei.T, ei.I, ei.L, ei.V};
    for (int i = 0; i < 4; ++i) CHECK(rel_err(last[i], expect[i]) <= 0.01);

    SUBCASE("endpoint is stable under tolerance tightening") {
        SolverConfig tight = cfg;
        tight.rtol = 1e-10;
        const Trajectory t2 = integrate(make_rhs_4cm(lp, {}), y0, tight);
        const auto l2 = t2.state(t2.size() - 1);
        for (int i = 0; i < 4; ++i) CHECK(rel_err(last[i], l2[i]) <= 1e-4);
    }
}

TEST_CASE("fixed-step order is at least four") {
    // Run the controller with a wide tolerance and h_init = h_max = h so each
    // step lands exactly at h; the endpoint error then scales like h^p.
    const double rate = 23.0;
    const double exact = 1e5 * std::exp(-rate);
    std::vector<double> log_h, log_e;
    for (const double h : {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        SolverConfig cfg;
        cfg.rtol = 1e-2;
        cfg.atol = {1e6};
        cfg.h_init = h;
        cfg.h_max = h;
        cfg.t_max = 1.0;
        const double y0[1] = {1e5};
        const Trajectory traj = integrate(scalar_decay(rate), y0, cfg);
        const double err = std::abs(traj.state(traj.size() - 1)[0] - exact);
        REQUIRE(err > 0.0);
        log_h.push_back(std::log(h));
        log_e.push_back(std::log(err));
    }
    // least-squares slope of log(err) against log(h)
    double mh = 0, me = 0;
    for (std::size_t i = 0; i < log_h.size(); ++i) {
        mh += log_h[i];
        me += log_e[i];
    }
    mh /= log_h.size();
    me /= log_e.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_h.size(); ++i) {
        num += (log_h[i] - mh) * (log_e[i] - me);
        den += (log_h[i] - mh) * (log_h[i] - mh);
    }
    const double slope = num / den;
    CHECK(slope >= 3.5);
    CHECK(slope <= 6.0);
}

TEST_CASE("positivity is preserved across random runs") {
    std::mt19937_64 rng(301);
    for (int i = 0; i < 30; ++i) {
        const LatentParams lp = testutil::random_params(rng);
        SolverConfig cfg = SolverConfig::defaults4();
        cfg.t_max = 50.0;
        const double y0[4] = {testutil::log_uniform(rng, 1e2, 1e6),
                              testutil::log_uniform(rng, 1e-2, 1e4), 0.0,
                              testutil::log_uniform(rng, 1e2, 1e6)};
        const Trajectory traj = integrate(make_rhs_4cm(lp, {}), y0, cfg);
        for (std::size_t s = 0; s < traj.size(); ++s) {
            const auto y = traj.state(s);
            for (int c = 0; c < 4; ++c) CHECK(y[c] >= -cfg.atol[c]);
        }
    }
}

TEST_CASE("integration is deterministic") {
    const LatentParams lp = preset_table1();
    SolverConfig cfg = SolverConfig::defaults4();
    cfg.t_max = 100.0;
    const double y0[4] = {4e5, 0.0, 0.0, 1e5};
    const Trajectory a = integrate(make_rhs_4cm(lp, {}), y0, cfg);
    const Trajectory b = integrate(make_rhs_4cm(lp, {}), y0, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.time(i) == b.time(i));
        for (int c = 0; c < 4; ++c) CHECK(a.state(i)[c] == b.state(i)[c]);
    }
}

TEST_CASE("dense output matches stored samples and stays continuous") {
    const LatentParams lp = preset_table1();
    SolverConfig cfg = SolverConfig::defaults4();
    cfg.t_max = 30.0;
    const double y0[4] = {4e5, 0.0, 0.0, 1e5};
    const Trajectory traj = integrate(make_rhs_4cm(lp, {}), y0, cfg);
    double buf[4];
    for (std::size_t i = 0; i < traj.size(); i += 7) {
        traj.evaluate(traj.time(i), buf);
        const auto y = traj.state(i);
        for (int c = 0; c < 4; ++c)
            CHECK(rel_err(buf[c], y[c]) <= 1e-12);
    }
    CHECK_THROWS_AS(traj.evaluate(31.0, buf), DomainError);
    CHECK_THROWS_AS(traj.evaluate(-1.0, buf), DomainError);
}

TEST_CASE("suppressed latent run stays above the clearance threshold for "
          "3000 days") {
    const LatentParams lp = preset_table1();
    const Efficacy eff{0.0, 0.519};
    SolverConfig cfg = SolverConfig::defaults4();
    cfg.t_max = 3000.0;
    const double y0[4] = {4e5, 0.0, 0.0, 1e5};
    const Trajectory traj = integrate(make_rhs_4cm(lp, eff), y0, cfg);
    const EventSpec ev{3, 1e-5, CrossingDirection::Downward};
    CHECK_FALSE(first_crossing(traj, ev).has_value());
}

TEST_CASE("terminal events stop the run early") {
    const double y0[1] = {1e5};
    SolverConfig cfg = scalar_config();
    cfg.t_max = 10.0;
    const EventSpec ev{0, 1.0, CrossingDirection::Downward, true};
    const Trajectory traj = integrate(scalar_decay(23.0), y0, cfg, {&ev, 1});
    REQUIRE(!traj.events().empty());
    const double expected = std::log(1e5) / 23.0;
    CHECK(std::abs(traj.events().front().time - expected) <= 1e-4);
    CHECK(traj.t_end() < 10.0);
    const auto tc = first_crossing(traj, ev);
    REQUIRE(tc.has_value());
    CHECK(std::abs(*tc - expected) <= 1e-4);
}
