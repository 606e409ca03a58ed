// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion runs a scenario pinned to the benchmark
// parameters (1.62 ped/min nominal rate, 3.5 m/s vehicle, 20 m / 160 degree
// sensing, 90% confidence intervals) and prints one PASS/FAIL line. Run all
// criteria with no arguments or a single criterion by number.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pedflow/experiments.hpp"
#include "pedflow/stats.hpp"

using namespace pedflow;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pedflow_acceptance" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", value);
    return buf;
}

// --- criterion 1: chi-squared quantile oracle ------------------------------

// Independent CDF for the oracle: Simpson quadrature of the density.
double quad_chi2_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    const double k2 = dof / 2.0;
    auto pdf = [k2](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp((k2 - 1.0) * std::log(t) - t / 2.0 - k2 * std::log(2.0) -
                        std::lgamma(k2));
    };
    const int steps = 4000;  // plenty for smooth densities over [0, ~250]
    const double h = x / steps;
    double sum = pdf(0.0) + pdf(x);
    for (int i = 1; i < steps; ++i) {
        sum += pdf(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

double quad_chi2_quantile(double p, double dof) {
    double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 20.0;
    while (quad_chi2_cdf(hi, dof) < p) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (quad_chi2_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome criterion_1() {
    Outcome out;
    double worst_closed = 0.0;
    for (double p : {0.05, 0.5, 0.95}) {
        const double err = std::abs(chi_squared_quantile(p, 2.0) - (-2.0 * std::log(1.0 - p)));
        worst_closed = std::max(worst_closed, err);
    }
    double worst_oracle = 0.0;
    for (double dof : {2.0, 20.0, 22.0, 100.0}) {
        for (double p : {0.05, 0.5, 0.95}) {
            const double err =
                std::abs(chi_squared_quantile(p, dof) - quad_chi2_quantile(p, dof));
            worst_oracle = std::max(worst_oracle, err);
        }
    }
    out.pass = worst_closed < 1e-8 && worst_oracle < 1e-6;
    out.detail = "closed-form err " + fmt(worst_closed) + ", oracle err " + fmt(worst_oracle);
    return out;
}

// --- criterion 2: stationary-counter MLE statistics ------------------------

Outcome criterion_2() {
    const EstimatorConfig config;
    const double rate = 1.62;
    const double duration = 3600.0;
    const int runs = 1000;
    double lambda_sum = 0.0;
    int covered = 0;
    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(20260809, seed_stream::repetition, static_cast<std::uint64_t>(run)));
        std::exponential_distribution<double> gap(rate / 60.0);
        std::vector<double> times;
        double t = gap(rng);
        while (t <= duration) {
            times.push_back(t);
            t += gap(rng);
        }
        const RateEstimate est = stationary_counter(0, times, duration, config);
        lambda_sum += est.lambda_per_min;
        if (est.lower_per_min <= rate && rate <= est.upper_per_min) ++covered;
    }
    const double mean = lambda_sum / runs;
    const double coverage = static_cast<double>(covered) / runs;
    Outcome out;
    out.pass = std::abs(mean - rate) <= 0.05 && coverage >= 0.85 && coverage <= 0.97;
    out.detail = "mean " + fmt(mean) + " (target 1.62 +- 0.05), coverage " + fmt(coverage);
    return out;
}

// --- criteria 3 and 4: single-link moving observer -------------------------

ExperimentSpec single_link_spec(std::uint64_t seed, int reps) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::visits_sweep;
    spec.repetitions = reps;
    spec.scenario.seed = seed;
    spec.scenario.vehicle_speed_mps = 3.5;
    spec.scenario.sensing = {20.0, 160.0};
    spec.out_dir = scratch_dir("single_link");
    return spec;
}

Outcome criterion_3() {
    ExperimentSpec spec = single_link_spec(101, 100);
    spec.visit_counts = {10};
    const auto points = run_visits_sweep(spec);
    const VisitsSweepPoint& p = points.front();
    Outcome out;
    const double rel = std::abs(p.mean_lambda - 1.62) / 1.62;
    out.pass = p.reps_with_data == 100 && rel <= 0.15 && p.coverage >= 0.85;
    out.detail = "mean lambda " + fmt(p.mean_lambda) + " (rel err " + fmt(rel) +
                 "), CI coverage " + fmt(p.coverage);
    return out;
}

Outcome criterion_4() {
    ExperimentSpec spec = single_link_spec(202, 100);
    spec.visit_counts = {2, 5, 10, 20};
    const auto points = run_visits_sweep(spec);
    Outcome out;
    std::string widths;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].reps_with_data == 0) out.pass = false;
        if (i > 0 && !(points[i].mean_width < points[i - 1].mean_width)) out.pass = false;
        widths += (i ? ", " : "") + fmt(points[i].mean_width);
    }
    out.detail = "mean CI widths across visits {2,5,10,20}: " + widths;
    return out;
}

// --- criterion 5: full-network experiment ----------------------------------

Outcome criterion_5() {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::full_network;
    spec.repetitions = 100;
    spec.scenario.seed = 303;
    spec.scenario.duration_s = 3600.0;
    spec.out_dir = scratch_dir("full_network");
    const FullNetworkReport report = run_full_network(spec);
    Outcome out;
    out.pass = report.all_active_links_estimated_every_rep &&
               report.active_truth_in_mean_ci >= 0.85 &&
               report.spearman_length_vs_width < 0.0;
    out.detail = std::string("every active link estimated: ") +
                 (report.all_active_links_estimated_every_rep ? "yes" : "no") +
                 ", truth in mean CI for " + fmt(100.0 * report.active_truth_in_mean_ci) +
                 "% of active links, spearman(length, width) " +
                 fmt(report.spearman_length_vs_width);
    return out;
}

// --- criterion 6: parked vehicle equals a stationary sub-segment counter ---

Outcome criterion_6() {
    const int reps = 200;
    const NetworkGraph graph = make_triangle_graph(1.62);
    ScenarioConfig base;
    base.vehicle_speed_mps = 0.0;
    base.vehicle_start_offset_m = 40.0;  // sector covers [40, 60] of link 0
    base.duration_s = 3600.0;
    base.seed = 404;
    const EstimatorConfig config;

    std::vector<double> moving(reps), stationary(reps);
    parallel_for(reps, 0, [&](int i) {
        ScenarioConfig scenario = base;
        scenario.seed = derive_seed(base.seed, seed_stream::repetition,
                                    static_cast<std::uint64_t>(i));
        Simulation sim(graph, scenario);
        const EventLog log = sim.run();
        const WindowExtraction extraction = extract_windows(log.snapshots, config);
        const auto est = estimate_rate(extraction.accepted.at(0), config);
        moving[static_cast<std::size_t>(i)] = est ? est->lambda_per_min : 0.0;

        // Arrivals at the covered sub-segment's origin, x = 40 m.
        std::vector<double> times;
        for (const ArrivalEvent& a : log.arrivals) {
            const double t = a.time_s + 40.0 / a.speed_mps;
            if (t <= scenario.duration_s) times.push_back(t);
        }
        stationary[static_cast<std::size_t>(i)] =
            stationary_counter(0, times, scenario.duration_s, config).lambda_per_min;
    });

    double mean_moving = 0.0, mean_stationary = 0.0;
    for (int i = 0; i < reps; ++i) {
        mean_moving += moving[static_cast<std::size_t>(i)];
        mean_stationary += stationary[static_cast<std::size_t>(i)];
    }
    mean_moving /= reps;
    mean_stationary /= reps;
    const double rel = std::abs(mean_moving - mean_stationary) / mean_stationary;
    Outcome out;
    out.pass = rel < 0.05;
    out.detail = "parked moving-observer mean " + fmt(mean_moving) +
                 ", sub-segment counter mean " + fmt(mean_stationary) + ", rel diff " +
                 fmt(rel);
    return out;
}

// --- criterion 7: independence filter under pacing --------------------------

Outcome criterion_7() {
    // Vehicle paces the pedestrians at an identical 1.5 m/s on a long link;
    // every projected window after the first is identical and so rejected.
    const NetworkGraph graph = make_two_node_graph(3.0, 600.0);
    ScenarioConfig scenario;
    scenario.vehicle_speed_mps = 1.5;
    scenario.pedestrian_speed = {1.5, 0.0, 0.3};
    scenario.duration_s = 300.0;
    scenario.seed = 505;
    const EstimatorConfig config;  // fallback speed 1.5 matches the pace

    Simulation sim(graph, scenario);
    const EventLog log = sim.run();
    int target_snapshots = 0;
    for (const SensingSnapshot& snap : log.snapshots) {
        if (snap.link == 0) ++target_snapshots;
    }
    const WindowExtraction extraction = extract_windows(log.snapshots, config);
    const int accepted = extraction.accepted.contains(0)
                             ? static_cast<int>(extraction.accepted.at(0).size())
                             : 0;
    Outcome out;
    out.pass = target_snapshots > 100 && accepted == 1 &&
               extraction.ledger.interiors_disjoint();
    out.detail = std::to_string(target_snapshots) + " snapshots of the paced link, " +
                 std::to_string(accepted) + " accepted (want exactly 1), ledger disjoint: " +
                 (extraction.ledger.interiors_disjoint() ? "yes" : "no");
    return out;
}

// --- criterion 8: fusion DF vs MLF ------------------------------------------

Outcome criterion_8() {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::roc;
    spec.repetitions = 20;
    spec.corpus = CorpusConfig{};  // 237 tracks / 22 min, 2 degree bias
    spec.corpus.seed = 606;
    spec.out_dir = scratch_dir("roc");
    const RocReport report = run_roc(spec);

    int dominated = 0;
    int operating = 0;
    double worst_hit = 1.0;
    for (const RocSeedResult& seed : report.seeds) {
        if (seed.df_dominates) ++dominated;
        if (seed.df_operating_point && seed.df_operating_point->hit_rate >= 0.90 &&
            seed.df_operating_point->false_positives_per_min <= 1.5) {
            ++operating;
            worst_hit = std::min(worst_hit, seed.df_operating_point->hit_rate);
        }
    }
    Outcome out;
    out.pass = dominated == 20 && operating == 20;
    out.detail = "DF dominates MLF in " + std::to_string(dominated) +
                 "/20 seeds; DF >= 90% hit at <= 1.5 FP/min in " +
                 std::to_string(operating) + "/20 (worst qualifying hit rate " +
                 fmt(worst_hit) + ")";
    return out;
}

// --- criterion 9: determinism -----------------------------------------------

Outcome criterion_9() {
    Outcome out;
    std::string mismatch;

    auto compare_dirs = [&](const std::filesystem::path& a, const std::filesystem::path& b) {
        std::vector<std::filesystem::path> names;
        for (const auto& entry : std::filesystem::directory_iterator(a)) {
            names.push_back(entry.path().filename());
        }
        std::sort(names.begin(), names.end());
        for (const auto& name : names) {
            if (read_file(a / name) != read_file(b / name)) {
                out.pass = false;
                mismatch += " " + name.string();
            }
        }
    };

    {
        ExperimentSpec spec = single_link_spec(707, 5);
        spec.visit_counts = {2, 3};
        spec.out_dir = scratch_dir("det_sweep_a");
        run_visits_sweep(spec);
        const auto dir_a = spec.out_dir;
        spec.out_dir = scratch_dir("det_sweep_b");
        run_visits_sweep(spec);
        compare_dirs(dir_a, spec.out_dir);
    }
    {
        ExperimentSpec spec;
        spec.kind = ExperimentKind::replay;
        spec.scenario.duration_s = 180.0;
        spec.scenario.seed = 808;
        spec.out_dir = scratch_dir("det_sim_a");
        run_simulate(spec);
        const auto dir_a = spec.out_dir;
        spec.out_dir = scratch_dir("det_sim_b");
        run_simulate(spec);
        compare_dirs(dir_a, spec.out_dir);

        const auto replay_a = scratch_dir("det_replay_a");
        const auto replay_b = scratch_dir("det_replay_b");
        run_replay(dir_a, EstimatorConfig{}, 60.0, replay_a);
        run_replay(dir_a, EstimatorConfig{}, 60.0, replay_b);
        compare_dirs(replay_a, replay_b);
    }
    {
        ExperimentSpec spec;
        spec.kind = ExperimentKind::roc;
        spec.repetitions = 1;
        spec.corpus.pedestrian_tracks = 40;
        spec.corpus.duration_s = 120.0;
        spec.corpus.seed = 909;
        spec.threads = 1;
        spec.out_dir = scratch_dir("det_roc_a");
        run_roc(spec);
        const auto dir_a = spec.out_dir;
        spec.out_dir = scratch_dir("det_roc_b");
        run_roc(spec);
        compare_dirs(dir_a, spec.out_dir);
    }

    out.detail = out.pass ? "sweep, simulate, replay and roc reruns are byte-identical"
                          : "mismatched files:" + mismatch;
    return out;
}

struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion> criteria{
    {1, "chi-squared quantile matches closed form and quadrature oracle", criterion_1},
    {2, "stationary-counter MLE mean and CI coverage at 1.62/min", criterion_2},
    {3, "moving observer on a single 100 m link, 10 traversals", criterion_3},
    {4, "mean CI width strictly decreases across visit counts", criterion_4},
    {5, "full-network experiment: coverage and length-uncertainty ranking", criterion_5},
    {6, "parked vehicle reduces to a stationary sub-segment counter", criterion_6},
    {7, "independence filter rejects all repeated windows when pacing", criterion_7},
    {8, "fusion: DF dominates MLF and reaches 90% hits at 1.5 FP/min", criterion_8},
    {9, "experiment reruns are byte-identical", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (only != 0 && criterion.number != only) continue;
        const Outcome outcome = criterion.run();
        std::printf("%s criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.number, criterion.name, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
