#include "hivdyn/thresholds.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "hivdyn/analysis.hpp"

namespace hivdyn {

namespace {

constexpr std::size_t kViralComponent3 = 2;
constexpr std::size_t kViralComponent4 = 3;

double untreated_number(ModelKind model, const LatentParams& lp) {
    return model == ModelKind::ThreeComponent ? r0(lp.core) : r_l(lp);
}

ThresholdResult run_metric(ModelKind model, const LatentParams& lp,
                           const State4& init, int n, double r,
                           const SolverConfig& solver) {
    if (n < 1) throw DomainError("threshold metric: n must be >= 1");
    const double eps = efficacy_for_ratio(model, lp, r);
    const Efficacy eff{0.0, eps}; // protease inhibitor only
    const double threshold = std::pow(10.0, -n);

    const bool three = model == ModelKind::ThreeComponent;
    const std::size_t viral = three ? kViralComponent3 : kViralComponent4;
    EventSpec ev{viral, threshold, CrossingDirection::Downward,
                 /*terminal=*/true};

    std::vector<double> y0 =
        three ? std::vector<double>{init.T, init.I, init.V}
              : std::vector<double>{init.T, init.I, init.L, init.V};

    SolverConfig cfg = solver;
    if (three && cfg.atol.size() == 4)
        cfg.atol = {cfg.atol[0], cfg.atol[1], cfg.atol[3]}; // drop the L slot

    ThresholdResult out;
    out.epsilon_used = eps;
    out.r_achieved = three ? r0(lp.core, eff) : r_l(lp, eff);
    if (y0[viral] <= threshold) {
        out.time = 0.0; // infimum convention
        return out;
    }
    const RhsFn rhs = three ? make_rhs_3cm(lp.core, eff) : make_rhs_4cm(lp, eff);
    const Trajectory traj = integrate(rhs, y0, cfg, {&ev, 1});
    out.time = first_crossing(traj, ev);
    return out;
}

} // namespace

double efficacy_for_ratio(ModelKind model, const LatentParams& lp, double r) {
    const double untreated = untreated_number(model, lp);
    if (!(r > 0.0) || !(r <= untreated))
        throw DomainError("efficacy_for_ratio: r must lie in (0, R_untreated]");
    return 1.0 - r / untreated;
}

ThresholdResult p_n(const CoreParams& core, const State3& init, int n,
                    double r, const SolverConfig& solver) {
    LatentParams lp{core, 0.0, 1.0, 0.0}; // latent block unused for metric P
    return run_metric(ModelKind::ThreeComponent, lp,
                      {init.T, init.I, 0.0, init.V}, n, r, solver);
}

ThresholdResult q_n(const LatentParams& lp, const State4& init, int n,
                    double r, const SolverConfig& solver) {
    return run_metric(ModelKind::Latent, lp, init, n, r, solver);
}

std::vector<SweepRow> sweep(ThresholdMetric metric, int n,
                            std::span<const double> r_grid,
                            const LatentParams& lp, const State4& init,
                            const SolverConfig& solver, unsigned jobs) {
    const ModelKind model = metric == ThresholdMetric::P
                                ? ModelKind::ThreeComponent
                                : ModelKind::Latent;
    std::vector<SweepRow> rows(r_grid.size());
    if (r_grid.empty()) return rows;

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(r_grid.size()));

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= r_grid.size()) return;
            SweepRow& row = rows[i];
            row.r = r_grid[i];
            try {
                const ThresholdResult res =
                    run_metric(model, lp, init, n, r_grid[i], solver);
                row.epsilon = res.epsilon_used;
                row.time = res.time;
            } catch (const std::exception& e) {
                row.epsilon = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

} // namespace hivdyn
