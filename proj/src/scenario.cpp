#include "hivdyn/scenario.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hivdyn/presets.hpp"

namespace hivdyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError("config: " + where + ": " + msg);
}

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
}

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& known) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) fail(where + "." + key, "unknown field");
}

double read_number(const json& j, const std::string& where, const char* key,
                   double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(where + "." + std::string(key), "expected a number");
    return v.get<double>();
}

std::size_t component_index(const json& v, ModelKind model,
                            const std::string& where) {
    const bool latent = model == ModelKind::Latent;
    if (v.is_number_unsigned()) {
        const auto idx = v.get<std::size_t>();
        if (idx >= (latent ? 4u : 3u)) fail(where, "component index out of range");
        return idx;
    }
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        if (name == "T") return 0;
        if (name == "I") return 1;
        if (name == "L" && latent) return 2;
        if (name == "V") return latent ? 3 : 2;
        fail(where, "unknown component name '" + name + "'");
    }
    fail(where, "expected a component name or index");
}

} // namespace

void Scenario::validate() const {
    params.validate();
    efficacy.validate();
    for (double v : {initials.T, initials.I, initials.L, initials.V})
        if (!std::isfinite(v) || v < 0)
            throw ConfigError("config: initials must be finite and nonnegative");
    const std::size_t dim = model == ModelKind::Latent ? 4 : 3;
    try {
        solver.validate(dim);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: solver: ") + e.what());
    }
    if (output.spacing != "log" && output.spacing != "linear")
        throw ConfigError("config: output.spacing must be 'log' or 'linear'");
    if (output.points < 1)
        throw ConfigError("config: output.points must be at least 1");
}

Scenario default_scenario() {
    Scenario sc;
    sc.params = preset_table1();
    sc.initials = preset_init_default();
    sc.solver = SolverConfig::defaults4();
    return sc;
}

Scenario scenario_from_json(const json& doc) {
    expect_object(doc, "top level");
    reject_unknown(doc, "top level",
                   {"model", "preset", "params", "efficacy", "initials",
                    "solver", "output", "events"});

    Scenario sc;

    if (doc.contains("model")) {
        const json& m = doc.at("model");
        if (!m.is_string()) fail("model", "expected a string");
        const std::string name = m.get<std::string>();
        if (name == "latent")
            sc.model = ModelKind::Latent;
        else if (name == "3cm")
            sc.model = ModelKind::ThreeComponent;
        else
            fail("model", "expected 'latent' or '3cm', got '" + name + "'");
    }

    std::string preset_name = "table1";
    if (doc.contains("preset")) {
        if (!doc.at("preset").is_string()) fail("preset", "expected a string");
        preset_name = doc.at("preset").get<std::string>();
    }
    try {
        sc.params = parameter_preset(preset_name);
    } catch (const DomainError& e) {
        fail("preset", e.what());
    }

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        expect_object(p, "params");
        reject_unknown(p, "params",
                       {"lambda", "d_T", "d_I", "d_V", "k", "N", "p", "alpha",
                        "d_L"});
        CoreParams& c = sc.params.core;
        c.lambda = read_number(p, "params", "lambda", c.lambda);
        c.d_T = read_number(p, "params", "d_T", c.d_T);
        c.d_I = read_number(p, "params", "d_I", c.d_I);
        c.d_V = read_number(p, "params", "d_V", c.d_V);
        c.k = read_number(p, "params", "k", c.k);
        c.N = read_number(p, "params", "N", c.N);
        sc.params.p = read_number(p, "params", "p", sc.params.p);
        sc.params.alpha = read_number(p, "params", "alpha", sc.params.alpha);
        sc.params.d_L = read_number(p, "params", "d_L", sc.params.d_L);
    }

    if (doc.contains("efficacy")) {
        const json& e = doc.at("efficacy");
        expect_object(e, "efficacy");
        reject_unknown(e, "efficacy", {"eps_RT", "eps_PI"});
        sc.efficacy.eps_RT = read_number(e, "efficacy", "eps_RT", 0.0);
        sc.efficacy.eps_PI = read_number(e, "efficacy", "eps_PI", 0.0);
    }

    sc.initials = preset_init_default();
    if (doc.contains("initials")) {
        const json& init = doc.at("initials");
        expect_object(init, "initials");
        reject_unknown(init, "initials", {"preset", "T", "I", "L", "V"});
        if (init.contains("preset")) {
            if (!init.at("preset").is_string())
                fail("initials.preset", "expected a string");
            try {
                sc.initials = initial_preset(init.at("preset").get<std::string>());
            } catch (const DomainError& e) {
                fail("initials.preset", e.what());
            }
        }
        sc.initials.T = read_number(init, "initials", "T", sc.initials.T);
        sc.initials.I = read_number(init, "initials", "I", sc.initials.I);
        sc.initials.L = read_number(init, "initials", "L", sc.initials.L);
        sc.initials.V = read_number(init, "initials", "V", sc.initials.V);
    }

    sc.solver = sc.model == ModelKind::Latent ? SolverConfig::defaults4()
                                              : SolverConfig::defaults3();
    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        expect_object(s, "solver");
        reject_unknown(s, "solver",
                       {"rtol", "atol", "h_init", "h_max", "t_max"});
        sc.solver.rtol = read_number(s, "solver", "rtol", sc.solver.rtol);
        sc.solver.h_init = read_number(s, "solver", "h_init", sc.solver.h_init);
        sc.solver.h_max = read_number(s, "solver", "h_max", sc.solver.h_max);
        sc.solver.t_max = read_number(s, "solver", "t_max", sc.solver.t_max);
        if (s.contains("atol")) {
            const json& a = s.at("atol");
            if (!a.is_array()) fail("solver.atol", "expected an array");
            sc.solver.atol.clear();
            for (const json& v : a) {
                if (!v.is_number()) fail("solver.atol", "expected numbers");
                sc.solver.atol.push_back(v.get<double>());
            }
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        expect_object(o, "output");
        reject_unknown(o, "output", {"points", "spacing"});
        if (o.contains("points")) {
            if (!o.at("points").is_number_unsigned())
                fail("output.points", "expected a nonnegative integer");
            sc.output.points = o.at("points").get<std::size_t>();
        }
        if (o.contains("spacing")) {
            if (!o.at("spacing").is_string())
                fail("output.spacing", "expected a string");
            sc.output.spacing = o.at("spacing").get<std::string>();
        }
    }

    if (doc.contains("events")) {
        const json& evs = doc.at("events");
        if (!evs.is_array()) fail("events", "expected an array");
        std::size_t idx = 0;
        for (const json& e : evs) {
            const std::string where = "events[" + std::to_string(idx++) + "]";
            expect_object(e, where);
            reject_unknown(e, where,
                           {"component", "threshold", "direction", "terminal"});
            EventSpec spec;
            if (!e.contains("component") || !e.contains("threshold"))
                fail(where, "component and threshold are required");
            spec.component = component_index(e.at("component"), sc.model, where);
            if (!e.at("threshold").is_number())
                fail(where + ".threshold", "expected a number");
            spec.threshold = e.at("threshold").get<double>();
            if (!(spec.threshold > 0))
                fail(where + ".threshold", "must be positive");
            if (e.contains("direction")) {
                const std::string d = e.at("direction").is_string()
                                          ? e.at("direction").get<std::string>()
                                          : "";
                if (d == "down")
                    spec.direction = CrossingDirection::Downward;
                else if (d == "up")
                    spec.direction = CrossingDirection::Upward;
                else
                    fail(where + ".direction", "expected 'down' or 'up'");
            }
            if (e.contains("terminal")) {
                if (!e.at("terminal").is_boolean())
                    fail(where + ".terminal", "expected a boolean");
                spec.terminal = e.at("terminal").get<bool>();
            }
            sc.events.push_back(spec);
        }
    }

    try {
        sc.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return sc;
}

namespace {

json parse_override_value(const std::string& text) {
    const json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded()) return parsed;
    return json(text);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key.path=value, got '" + assignment +
                          "'");
    const std::string path = assignment.substr(0, eq);
    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("--set: empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = parse_override_value(assignment.substr(eq + 1));
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

} // namespace

Scenario load_scenario(const std::string& config_path,
                       const std::string& params_preset,
                       const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("config: cannot open '" + config_path + "'");
        try {
            in >> doc;
        } catch (const json::parse_error& e) {
            throw ConfigError("config: " + config_path + ": " + e.what());
        }
    }
    if (!params_preset.empty()) doc["preset"] = params_preset;
    for (const std::string& ov : overrides) apply_override(doc, ov);
    return scenario_from_json(doc);
}

json scenario_to_json(const Scenario& sc) {
    json doc;
    doc["model"] = sc.model == ModelKind::Latent ? "latent" : "3cm";
    doc["params"] = {{"lambda", sc.params.core.lambda},
                     {"d_T", sc.params.core.d_T},
                     {"d_I", sc.params.core.d_I},
                     {"d_V", sc.params.core.d_V},
                     {"k", sc.params.core.k},
                     {"N", sc.params.core.N},
                     {"p", sc.params.p},
                     {"alpha", sc.params.alpha},
                     {"d_L", sc.params.d_L}};
    doc["efficacy"] = {{"eps_RT", sc.efficacy.eps_RT},
                       {"eps_PI", sc.efficacy.eps_PI}};
    if (sc.model == ModelKind::Latent)
        doc["initials"] = {{"T", sc.initials.T},
                           {"I", sc.initials.I},
                           {"L", sc.initials.L},
                           {"V", sc.initials.V}};
    else
        doc["initials"] = {{"T", sc.initials.T},
                           {"I", sc.initials.I},
                           {"V", sc.initials.V}};
    doc["solver"] = {{"rtol", sc.solver.rtol},
                     {"atol", sc.solver.atol},
                     {"h_init", sc.solver.h_init},
                     {"h_max", sc.solver.h_max},
                     {"t_max", sc.solver.t_max}};
    doc["output"] = {{"points", sc.output.points},
                     {"spacing", sc.output.spacing}};
    return doc;
}

} // namespace hivdyn
