#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hivdyn/presets.hpp"
#include "hivdyn/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct GlobalOpts {
    std::string config;
    std::string preset;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    unsigned jobs = 0;
};

hivdyn::Scenario make_scenario(const GlobalOpts& g) {
    return hivdyn::load_scenario(g.config, g.preset, g.sets);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw hivdyn::IoError("cannot create output directory " + dir);
}

void print_presets() {
    using nlohmann::json;
    json doc;
    for (const std::string& name : hivdyn::parameter_preset_names()) {
        const hivdyn::LatentParams lp = hivdyn::parameter_preset(name);
        doc["parameters"][name] = {{"lambda", lp.core.lambda},
                                   {"d_T", lp.core.d_T},
                                   {"d_I", lp.core.d_I},
                                   {"d_V", lp.core.d_V},
                                   {"k", lp.core.k},
                                   {"N", lp.core.N},
                                   {"p", lp.p},
                                   {"alpha", lp.alpha},
                                   {"d_L", lp.d_L}};
    }
    for (const std::string& name : hivdyn::initial_preset_names()) {
        const hivdyn::State4 s = hivdyn::initial_preset(name);
        doc["initials"][name] = {
            {"T", s.T}, {"I", s.I}, {"L", s.L}, {"V", s.V}};
    }
    std::cout << doc.dump(2) << '\n';
}

std::vector<double> build_grid(const std::vector<double>& values,
                               const std::string& range) {
    std::vector<double> grid = values;
    if (!range.empty()) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
            step <= 0)
            throw hivdyn::ConfigError(
                "--r-range expects start:stop:step with positive step");
        for (double r = lo; r <= hi + 1e-12 * step; r += step)
            grid.push_back(r);
    }
    return grid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Within-host viral dynamics: analysis, simulation and "
                 "eradication-time metrics"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON scenario file");
    app.add_option("--preset", g.preset, "parameter preset name");
    app.add_option("--out", g.out_dir, "output directory")
        ->capture_default_str();
    app.add_option("--set", g.sets,
                   "dotted override, e.g. efficacy.eps_PI=0.519 (repeatable)");
    app.add_option("--jobs", g.jobs,
                   "worker threads for sweeps (0 = hardware)");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "reproduction numbers, equilibria and stability");

    CLI::App* simulate =
        app.add_subcommand("simulate", "integrate the model and write CSV");

    CLI::App* threshold = app.add_subcommand(
        "threshold", "time for the viral load to reach 10^-n");
    std::string metric_name = "Q";
    int n = 5;
    std::vector<double> r_values;
    std::string r_range;
    threshold->add_option("--metric", metric_name, "P (3-component) or Q (latent)")
        ->check(CLI::IsMember({"P", "Q"}));
    threshold->add_option("-n,--exponent", n, "threshold exponent (10^-n)")
        ->check(CLI::PositiveNumber);
    threshold->add_option("--r", r_values, "target reproduction ratio(s)");
    threshold->add_option("--r-range", r_range, "grid as start:stop:step");

    CLI::App* lyapunov = app.add_subcommand(
        "lyapunov", "verify descent of the Lyapunov function");
    std::string which_name = "non-infective";
    lyapunov
        ->add_option("--which", which_name,
                     "reference equilibrium: non-infective or endemic")
        ->check(CLI::IsMember({"non-infective", "endemic"}));

    CLI::App* presets = app.add_subcommand("presets", "preset management");
    CLI::App* presets_list =
        presets->add_subcommand("list", "print all presets as JSON");
    presets->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (presets_list->parsed()) {
            print_presets();
            return kExitOk;
        }
        ensure_out_dir(g.out_dir);
        const std::filesystem::path out_dir(g.out_dir);

        if (analyze->parsed()) {
            const hivdyn::RunReport report =
                hivdyn::cmd_analyze(make_scenario(g), out_dir, true);
            std::cout << report.dump(2) << '\n';
        } else if (simulate->parsed()) {
            const hivdyn::RunReport report =
                hivdyn::cmd_simulate(make_scenario(g), out_dir);
            std::cout << report.dump(2) << '\n';
        } else if (threshold->parsed()) {
            const auto metric = metric_name == "P"
                                    ? hivdyn::ThresholdMetric::P
                                    : hivdyn::ThresholdMetric::Q;
            const hivdyn::RunReport report = hivdyn::cmd_threshold(
                make_scenario(g), metric, n, build_grid(r_values, r_range),
                g.jobs, out_dir);
            std::cout << report.dump(2) << '\n';
        } else if (lyapunov->parsed()) {
            const auto which = which_name == "endemic"
                                   ? hivdyn::EquilibriumKind::Endemic
                                   : hivdyn::EquilibriumKind::NonInfective;
            const hivdyn::RunReport report =
                hivdyn::cmd_lyapunov(make_scenario(g), which, out_dir);
            std::cout << report.dump(2) << '\n';
        }
        return kExitOk;
    } catch (const hivdyn::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const hivdyn::IoError& e) {
        std::cerr << "io failure: " << e.what() << '\n';
        return kExitIo;
    } catch (const hivdyn::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
