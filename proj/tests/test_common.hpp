#pragma once

#include <cmath>
#include <random>

#include "hivdyn/presets.hpp"

namespace testutil {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// Log-uniform draw spanning [0.1x, 10x] of each reference value, p in
// [0.01, 0.5].
inline hivdyn::LatentParams random_params(std::mt19937_64& rng) {
    const hivdyn::LatentParams t = hivdyn::preset_table1();
    hivdyn::LatentParams lp;
    lp.core.lambda = log_uniform(rng, 0.1 * t.core.lambda, 10 * t.core.lambda);
    lp.core.d_T = log_uniform(rng, 0.1 * t.core.d_T, 10 * t.core.d_T);
    lp.core.d_I = log_uniform(rng, 0.1 * t.core.d_I, 10 * t.core.d_I);
    lp.core.d_V = log_uniform(rng, 0.1 * t.core.d_V, 10 * t.core.d_V);
    lp.core.k = log_uniform(rng, 0.1 * t.core.k, 10 * t.core.k);
    lp.core.N = log_uniform(rng, 0.1 * t.core.N, 10 * t.core.N);
    lp.p = log_uniform(rng, 0.01, 0.5);
    lp.alpha = log_uniform(rng, 0.1 * t.alpha, 10 * t.alpha);
    lp.d_L = log_uniform(rng, 0.1 * t.d_L, 10 * t.d_L);
    return lp;
}

inline hivdyn::State4 random_state(std::mt19937_64& rng, double lo = 1e-2,
                                   double hi = 1e6) {
    return {log_uniform(rng, lo, hi), log_uniform(rng, lo, hi),
            log_uniform(rng, lo, hi), log_uniform(rng, lo, hi)};
}

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline double rel_err(double got, double want) {
    const double scale = std::max(std::abs(got), std::abs(want));
    return scale == 0.0 ? 0.0 : std::abs(got - want) / scale;
}

} // namespace testutil
