// SPDX-License-Identifier: Apache-2.0
//
// pedflow: pedestrian traffic simulation and moving-observer arrival-rate
// estimation. Subcommands cover the full pipeline: simulate a scenario,
// estimate rates from recorded logs, replay moving-average profiles, run the
// fusion ROC comparison, and run the Monte Carlo benchmark experiments.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pedflow/errors.hpp"
#include "pedflow/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<double> alpha;
    std::optional<std::string> out;
    std::optional<double> window_sec;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_config = true) {
    if (with_config) {
        cmd->add_option("--config", flags.config_path, "JSON config file (or a report.json)");
    }
    cmd->add_option("--seed", flags.seed, "Master random seed");
    cmd->add_option("--reps", flags.reps, "Monte Carlo repetitions");
    cmd->add_option("--alpha", flags.alpha, "Confidence parameter (0.1 = 90% intervals)");
    cmd->add_option("--out", flags.out, "Output directory");
    cmd->add_option("--window-sec", flags.window_sec, "Moving-average window in seconds");
}

pedflow::ExperimentSpec resolve_spec(const CommonFlags& flags,
                                     pedflow::ExperimentKind kind) {
    pedflow::ExperimentSpec spec;
    if (!flags.config_path.empty()) {
        spec = pedflow::load_experiment_spec(flags.config_path);
    }
    spec.kind = kind;
    if (flags.seed) spec.scenario.seed = *flags.seed;
    if (flags.seed) spec.corpus.seed = *flags.seed;
    if (flags.reps) spec.repetitions = *flags.reps;
    if (flags.alpha) spec.estimator.alpha = *flags.alpha;
    if (flags.out) spec.out_dir = *flags.out;
    if (flags.window_sec) spec.estimator.window_s = *flags.window_sec;
    return spec;
}

int run_validate_graph(const std::string& path) {
    const pedflow::NetworkGraph graph = pedflow::load_graph(path);
    const auto report = pedflow::validate_graph(graph);
    if (report.empty()) {
        std::cout << "valid: " << graph.nodes().size() << " nodes, "
                  << graph.links().size() << " links, " << graph.routes().size()
                  << " routes\n";
        return 0;
    }
    for (const std::string& violation : report) {
        std::cout << "violation: " << violation << "\n";
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pedestrian traffic simulator and moving-observer rate estimator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string graph_path;
    std::string logs_dir;
    std::optional<double> fallback_speed;
    std::optional<double> eval_step;

    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its event log");
    add_common_flags(simulate, flags);

    auto* estimate = app.add_subcommand("estimate", "Per-link rate estimates from an event log");
    estimate->add_option("--logs", logs_dir, "Event log directory")->required();
    estimate->add_option("--fallback-speed", fallback_speed, "Expected speed for empty windows (m/s)");
    add_common_flags(estimate, flags);

    auto* replay = app.add_subcommand("replay", "Moving-average rate profiles from an event log");
    replay->add_option("--logs", logs_dir, "Event log directory")->required();
    replay->add_option("--fallback-speed", fallback_speed, "Expected speed for empty windows (m/s)");
    replay->add_option("--eval-step-sec", eval_step, "Profile evaluation step in seconds");
    add_common_flags(replay, flags);

    auto* roc = app.add_subcommand("roc", "DF vs MLF fusion ROC comparison on a synthetic corpus");
    add_common_flags(roc, flags);

    auto* sweep_visits = app.add_subcommand("sweep-visits", "Single-link estimates vs number of link traversals");
    add_common_flags(sweep_visits, flags);

    auto* sweep_rates = app.add_subcommand("sweep-rates", "Single-link estimates vs true arrival rate");
    add_common_flags(sweep_rates, flags);

    auto* full_network = app.add_subcommand("full-network", "Whole-network moving observer vs stationary counters");
    add_common_flags(full_network, flags);

    auto* validate = app.add_subcommand("validate-graph", "Check a graph file against the structural invariants");
    validate->add_option("graph", graph_path, "Graph JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            return run_validate_graph(graph_path);
        }
        if (simulate->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::replay);
            pedflow::run_simulate(spec);
            std::cout << "event log written to " << spec.out_dir.string() << "\n";
            return 0;
        }
        if (estimate->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::replay);
            if (fallback_speed) spec.estimator.fallback_speed_mps = *fallback_speed;
            auto estimates = pedflow::run_estimate(logs_dir, spec.estimator, spec.out_dir);
            std::cout << estimates.size() << " link estimates written to "
                      << (spec.out_dir / "estimates.csv").string() << "\n";
            return 0;
        }
        if (replay->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::replay);
            if (fallback_speed) spec.estimator.fallback_speed_mps = *fallback_speed;
            const double step = eval_step.value_or(spec.eval_step_s);
            auto points = pedflow::run_replay(logs_dir, spec.estimator, step, spec.out_dir);
            std::cout << points.size() << " profile points written to "
                      << (spec.out_dir / "profiles.csv").string() << "\n";
            return 0;
        }
        if (roc->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::roc);
            auto report = pedflow::run_roc(spec);
            int dominated = 0;
            for (const auto& seed : report.seeds) dominated += seed.df_dominates ? 1 : 0;
            std::cout << "DF dominates MLF in " << dominated << "/" << report.seeds.size()
                      << " seeds; results in " << spec.out_dir.string() << "\n";
            return 0;
        }
        if (sweep_visits->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::visits_sweep);
            auto points = pedflow::run_visits_sweep(spec);
            std::cout << points.size() << " sweep points written to "
                      << (spec.out_dir / "visits_sweep.csv").string() << "\n";
            return 0;
        }
        if (sweep_rates->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::rate_sweep);
            auto points = pedflow::run_rate_sweep(spec);
            std::cout << points.size() << " sweep points written to "
                      << (spec.out_dir / "rate_sweep.csv").string() << "\n";
            return 0;
        }
        if (full_network->parsed()) {
            auto spec = resolve_spec(flags, pedflow::ExperimentKind::full_network);
            auto report = pedflow::run_full_network(spec);
            std::cout << "aggregated " << report.repetitions << " repetitions over "
                      << report.links.size() << " links; results in "
                      << spec.out_dir.string() << "\n";
            return 0;
        }
    } catch (const pedflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const pedflow::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
