// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pedflow/corpus.hpp"
#include "pedflow/estimator.hpp"
#include "pedflow/event_log.hpp"
#include "pedflow/fusion.hpp"
#include "pedflow/graph_io.hpp"

namespace pedflow {

enum class ExperimentKind {
    full_network,
    visits_sweep,
    rate_sweep,
    roc,
    replay,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Everything needed to run one experiment batch. Loadable from a JSON
/// config document (see load_experiment_spec); every field has a default
/// mirroring the benchmark scenarios.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::full_network;
    ScenarioConfig scenario;
    EstimatorConfig estimator;
    CorpusConfig corpus;
    int repetitions = 100;
    std::vector<int> visit_counts{2, 5, 10, 20};
    std::vector<double> rates_per_min{0.5, 1.0, 1.62, 3.0};
    /// When set, overrides the rate of every route in the graph.
    std::optional<double> route_rate_per_min;
    double eval_step_s = 60.0;
    std::filesystem::path out_dir = "out";
    int threads = 0;  ///< 0 = hardware concurrency
};

/// Throws ConfigError when batch parameters are out of range.
void validate_spec(const ExperimentSpec& spec);

/// Parses a JSON config (sections: kind, scenario, estimator, corpus,
/// experiment; unknown keys rejected). A report document produced by a
/// previous run is also accepted: its embedded "config" object is unwrapped,
/// which makes any report re-runnable as-is.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// The spec as a JSON config document (the form reports embed).
std::string experiment_spec_json(const ExperimentSpec& spec);

/// Pedestrian arrival times at the origin of every link, projected from the
/// network arrival log along each route at the pedestrian's constant speed.
/// Times beyond `duration_s` (walkers still en route at the end) are
/// excluded. This is the ground-truth input of the stationary counter.
std::map<LinkId, std::vector<double>> link_arrival_times(
    const NetworkGraph& graph, std::span<const ArrivalEvent> arrivals,
    double duration_s);

/// Per-link aggregate over the repetitions of a network experiment.
struct LinkAggregate {
    LinkId link = 0;
    double length_m = 0.0;
    double truth_per_min = 0.0;
    bool active = false;
    int reps_with_estimate = 0;
    double mean_lambda = 0.0;
    double mean_lower = 0.0;
    double mean_upper = 0.0;
    double mean_width = 0.0;
    double coverage = 0.0;  ///< fraction of reps with truth inside the CI
    double stat_mean_lambda = 0.0;
    double stat_mean_lower = 0.0;
    double stat_mean_upper = 0.0;
    double stat_coverage = 0.0;
};

struct FullNetworkReport {
    int repetitions = 0;
    std::vector<LinkAggregate> links;  ///< every link, ordered by id
    bool all_active_links_estimated_every_rep = false;
    /// Fraction of active links whose truth lies inside the rep-averaged CI.
    double active_truth_in_mean_ci = 0.0;
    /// Spearman rank correlation of link length vs mean CI width (active links).
    double spearman_length_vs_width = 0.0;
};

/// Full-network experiment: one moving observer on the scenario graph per
/// repetition, moving-observer estimates for every link, stationary-counter
/// baselines, ground truth, aggregated over repetitions. Writes per_link.csv
/// and report.json into spec.out_dir.
FullNetworkReport run_full_network(const ExperimentSpec& spec);

struct VisitsSweepPoint {
    int visits = 0;
    int reps_with_data = 0;
    double mean_lambda = 0.0;
    double mean_width = 0.0;
    double coverage = 0.0;
    double mean_total_count = 0.0;
    double mean_total_period_s = 0.0;
};

/// Single-link experiment on the triangle scenario: the vehicle observes the
/// 100 m target link for one third of the run; the sweep varies how many
/// times it traverses the link. Writes visits_sweep.csv and report.json.
std::vector<VisitsSweepPoint> run_visits_sweep(const ExperimentSpec& spec);

struct RateSweepPoint {
    double rate_per_min = 0.0;
    int reps_with_data = 0;
    double mean_lambda = 0.0;
    double mean_width = 0.0;
    double coverage = 0.0;
    double rel_error = 0.0;  ///< |mean_lambda - rate| / rate (0 when rate = 0)
};

/// Same single-link experiment at a fixed number of visits over a range of
/// true arrival rates. Writes rate_sweep.csv and report.json.
std::vector<RateSweepPoint> run_rate_sweep(const ExperimentSpec& spec);

struct RocSeedResult {
    std::uint64_t seed = 0;
    bool df_dominates = false;
    std::optional<RocPoint> df_operating_point;   ///< best DF point at <= 1.5 fp/min
    std::optional<RocPoint> mlf_operating_point;  ///< best MLF point at <= 1.5 fp/min
};

struct RocReport {
    std::vector<RocSeedResult> seeds;
    std::vector<RocPoint> df_curve;   ///< first seed
    std::vector<RocPoint> mlf_curve;  ///< first seed
};

/// Generates `repetitions` corpora (seed varied), scores both fusion methods
/// across their natural thresholds, and summarizes dominance and operating
/// points. Writes roc_df.csv, roc_mlf.csv and report.json.
RocReport run_roc(const ExperimentSpec& spec);

/// Runs one simulation on the scenario graph and writes its event log plus
/// config.json into out_dir. Returns the log.
EventLog run_simulate(const ExperimentSpec& spec);

/// Overall per-link estimates from a recorded log directory; writes
/// estimates.csv into out_dir.
std::vector<RateEstimate> run_estimate(const std::filesystem::path& log_dir,
                                       const EstimatorConfig& config,
                                       const std::filesystem::path& out_dir);

/// Moving-average profiles for every link in a recorded log directory;
/// writes profiles.csv (gaps as empty fields) into out_dir.
std::vector<ProfilePoint> run_replay(const std::filesystem::path& log_dir,
                                     const EstimatorConfig& config,
                                     double eval_step_s,
                                     const std::filesystem::path& out_dir);

/// Loads the scenario graph: spec.scenario.graph_file when set (validated),
/// the bundled benchmark graph otherwise, with the route-rate override
/// applied.
NetworkGraph scenario_graph(const ExperimentSpec& spec);

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// Results must be written to per-index slots; the call blocks until done.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace pedflow
