#pragma once

#include <string>
#include <vector>

#include "hivdyn/model.hpp"

namespace hivdyn {

/// Parameter preset "table1": the reference within-host constants
/// lambda = 1e4, d_T = 0.01, d_I = 1, d_V = 23, k = 2.4e-8, N = 2000,
/// d_L = 4e-3, alpha = 0.01, p = 0.1.
LatentParams preset_table1();

/// Initial-state preset "init-default": T = 4e5, I = 0, L = 0, V = 1e5.
State4 preset_init_default();

std::vector<std::string> parameter_preset_names();
std::vector<std::string> initial_preset_names();

LatentParams parameter_preset(const std::string& name);
State4 initial_preset(const std::string& name);

} // namespace hivdyn
