// SPDX-License-Identifier: Apache-2.0
//
// rsma_fbl: command-line front end.
//
//   rsma_fbl bound    [--config PATH] [--seed N] [--trials N] [--out PATH] [--t T...] [--zeta Z]
//   rsma_fbl optimize [--config PATH] [--seed N] [--trials N] [--out PATH]
//   rsma_fbl sweep    SPEC.json [--seed N] [--trials N] [--out PATH] [--svg [PATH]]
//   rsma_fbl selftest
//
// Exit status: 0 success, 1 runtime or configuration error, 2 QoS infeasible
// (optimize), 64 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rsma/config_io.hpp"
#include "rsma/errors.hpp"
#include "rsma/experiment.hpp"

namespace {

constexpr int kExitUsage = 64;

rsma::SystemConfig load_or_default(const std::string& path) {
    return path.empty() ? rsma::SystemConfig::defaults() : rsma::load_system_config(path);
}

// Writes to `path`, or stdout when empty. Output is binary so line endings stay LF.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rsma::ConfigError(path + ": cannot open for writing");
    f << text;
    if (!f) throw rsma::ConfigError(path + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-blocklength ergodic rates and power allocation for rate-splitting multiple access"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Monte Carlo seed");
        sub->add_option("--trials", trials, "Monte Carlo trials M")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_path, "Output file (stdout when omitted)");
    };

    auto* bound = app.add_subcommand("bound", "Closed-form sum-rate bound versus SAA over a grid of t");
    add_common(bound);
    std::vector<double> t_grid;
    bool t_given = false;
    double zeta = 1000.0;
    bound->add_option("--t", t_grid, "Grid of t values")->expected(0, -1)->each([&](const std::string&) {
        t_given = true;
    });
    bound->add_option("--zeta", zeta, "Per-user zeta override; 0 keeps the path-loss model");

    auto* optimize = app.add_subcommand("optimize", "Run the single-step power allocation and print a JSON report");
    add_common(optimize);

    auto* sweep = app.add_subcommand("sweep", "Evaluate schemes over a sweep axis and write CSV");
    std::string spec_path;
    std::optional<std::string> svg_path;
    sweep->add_option("spec", spec_path, "Sweep JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--seed", seed, "Monte Carlo seed");
    sweep->add_option("--trials", trials, "Monte Carlo trials M")->check(CLI::PositiveNumber);
    sweep->add_option("--out", out_path, "CSV output (overrides output_path)");
    auto* svg_flag = sweep->add_option("--svg", svg_path, "Also write an SVG chart (default: CSV path with .svg)")
                         ->expected(0, 1);

    auto* selftest = app.add_subcommand("selftest", "Run the built-in numerical checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*bound) {
            if (bound->count("--t") > 0 && (!t_given || t_grid.empty())) {
                std::cerr << "error: --t requires at least one value\n";
                return kExitUsage;
            }
            rsma::BoundOptions opt;
            if (!t_grid.empty()) opt.t_grid = t_grid;
            opt.trials = trials.value_or(rsma::kDefaultTrials);
            const rsma::SystemConfig cfg = load_or_default(config_path);
            opt.seed = seed.value_or(cfg.rng_seed);
            if (zeta > 0.0) opt.zeta_override = zeta;
            else opt.zeta_override.reset();
            std::ostringstream csv;
            rsma::write_bound_csv(csv, rsma::run_bound(cfg, opt));
            emit(out_path, csv.str());
            return 0;
        }
        if (*optimize) {
            const rsma::SystemConfig cfg = load_or_default(config_path);
            const auto outcome =
                rsma::run_optimize(cfg, trials.value_or(rsma::kDefaultTrials), seed.value_or(cfg.rng_seed));
            emit(out_path, outcome.document.dump(2) + "\n");
            std::cerr << outcome.summary;
            return outcome.exit_code;
        }
        if (*sweep) {
            rsma::SweepSpec spec = rsma::load_sweep_spec(spec_path);
            if (seed) spec.seed = *seed;
            if (trials) spec.trials = *trials;
            if (!out_path.empty()) spec.output_path = out_path;
            if (svg_flag->count() > 0)
                spec.svg_path = svg_path && !svg_path->empty() ? *svg_path
                                : spec.output_path.empty()     ? "sweep.svg"
                                                               : std::filesystem::path(spec.output_path).replace_extension(".svg").string();
            const auto rows = rsma::run_sweep(spec);
            std::ostringstream csv;
            rsma::write_sweep_csv(csv, rows, spec.scenario.num_users);
            emit(spec.output_path, csv.str());
            if (!spec.svg_path.empty()) emit(spec.svg_path, rsma::render_sweep_svg(rows, spec.axis));
            return 0;
        }
        if (*selftest) return rsma::report_selftest(rsma::run_selftest(), std::cout);
    } catch (const rsma::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
