#include "hivdyn/presets.hpp"

namespace hivdyn {

LatentParams preset_table1() {
    CoreParams core{1e4, 0.01, 1.0, 23.0, 2.4e-8, 2000.0};
    return {core, 0.1, 0.01, 4e-3};
}

State4 preset_init_default() { return {4e5, 0.0, 0.0, 1e5}; }

std::vector<std::string> parameter_preset_names() { return {"table1"}; }

std::vector<std::string> initial_preset_names() { return {"init-default"}; }

LatentParams parameter_preset(const std::string& name) {
    if (name == "table1") return preset_table1();
    throw DomainError("unknown parameter preset: " + name);
}

State4 initial_preset(const std::string& name) {
    if (name == "init-default") return preset_init_default();
    throw DomainError("unknown initial-state preset: " + name);
}

} // namespace hivdyn
