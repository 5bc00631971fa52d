#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hivdyn/integrator.hpp"
#include "hivdyn/thresholds.hpp"

namespace hivdyn {

struct OutputOptions {
    std::size_t points = 1000;  ///< trajectory samples written by `simulate`
    std::string spacing = "log";///< "log" or "linear"
};

/// A fully resolved run configuration.  The three-component model reads the
/// core parameters and the (T, I, V) sub-state.
struct Scenario {
    ModelKind model = ModelKind::Latent;
    LatentParams params;
    Efficacy efficacy;
    State4 initials;
    SolverConfig solver;
    OutputOptions output;
    std::vector<EventSpec> events;

    void validate() const;
};

/// Scenario with preset "table1" parameters, "init-default" initials and
/// default solver settings.
Scenario default_scenario();

/// Builds a scenario from a JSON document.  Unknown keys are rejected;
/// presets named in "preset" fields are applied before field overrides.
/// Throws ConfigError with field diagnostics.
Scenario scenario_from_json(const nlohmann::json& doc);

/// Parses a JSON config file and applies dotted-path overrides of the form
/// "efficacy.eps_PI=0.519" on top of it.  An empty path uses the defaults.
Scenario load_scenario(const std::string& config_path,
                       const std::string& params_preset,
                       const std::vector<std::string>& overrides);

nlohmann::json scenario_to_json(const Scenario& sc);

} // namespace hivdyn
