// SPDX-License-Identifier: Apache-2.0
#include "pedflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "pedflow/csv.hpp"
#include "pedflow/stats.hpp"

namespace pedflow {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it != obj.end()) out = it->get<T>();
}

void parse_scenario(const json& obj, ScenarioConfig& scenario, const std::string& where) {
    reject_unknown_keys(obj,
                        {"graph_file", "pedestrian_speed", "vehicle_speed_mps", "sensing",
                         "duration_s", "snapshot_hz", "seed", "vehicle_start_node",
                         "vehicle_start_offset_m", "speed_noise_std_mps"},
                        where);
    read_field(obj, "graph_file", scenario.graph_file);
    if (obj.contains("pedestrian_speed")) {
        const json& js = obj["pedestrian_speed"];
        reject_unknown_keys(js, {"mean_mps", "std_mps", "floor_mps"}, where + ".pedestrian_speed");
        read_field(js, "mean_mps", scenario.pedestrian_speed.mean_mps);
        read_field(js, "std_mps", scenario.pedestrian_speed.std_mps);
        read_field(js, "floor_mps", scenario.pedestrian_speed.floor_mps);
    }
    read_field(obj, "vehicle_speed_mps", scenario.vehicle_speed_mps);
    if (obj.contains("sensing")) {
        const json& js = obj["sensing"];
        reject_unknown_keys(js, {"range_m", "fov_deg"}, where + ".sensing");
        read_field(js, "range_m", scenario.sensing.range_m);
        read_field(js, "fov_deg", scenario.sensing.fov_deg);
    }
    read_field(obj, "duration_s", scenario.duration_s);
    read_field(obj, "snapshot_hz", scenario.snapshot_hz);
    read_field(obj, "seed", scenario.seed);
    read_field(obj, "vehicle_start_node", scenario.vehicle_start_node);
    read_field(obj, "vehicle_start_offset_m", scenario.vehicle_start_offset_m);
    read_field(obj, "speed_noise_std_mps", scenario.speed_noise_std_mps);
}

void parse_estimator(const json& obj, EstimatorConfig& estimator, const std::string& where) {
    reject_unknown_keys(obj, {"alpha", "fallback_speed_mps", "window_s"}, where);
    read_field(obj, "alpha", estimator.alpha);
    read_field(obj, "fallback_speed_mps", estimator.fallback_speed_mps);
    read_field(obj, "window_s", estimator.window_s);
}

void parse_corpus(const json& obj, CorpusConfig& corpus, const std::string& where) {
    reject_unknown_keys(obj,
                        {"duration_s", "pedestrian_tracks", "pair_fraction",
                         "pair_spacing_min_m", "pair_spacing_max_m", "clutter_tracks_per_min",
                         "clutter_near_fraction", "clutter_life_min_s", "clutter_life_max_s",
                         "frame_hz", "miss_rate", "false_detections_per_min",
                         "bearing_noise_deg", "calibration_bias_deg", "bbox_half_width_deg",
                         "spawn_range_min_m", "spawn_range_max_m", "ped_speed_mps",
                         "ped_life_min_s", "ped_life_max_s", "seed"},
                        where);
    read_field(obj, "duration_s", corpus.duration_s);
    read_field(obj, "pedestrian_tracks", corpus.pedestrian_tracks);
    read_field(obj, "pair_fraction", corpus.pair_fraction);
    read_field(obj, "pair_spacing_min_m", corpus.pair_spacing_min_m);
    read_field(obj, "pair_spacing_max_m", corpus.pair_spacing_max_m);
    read_field(obj, "clutter_tracks_per_min", corpus.clutter_tracks_per_min);
    read_field(obj, "clutter_near_fraction", corpus.clutter_near_fraction);
    read_field(obj, "clutter_life_min_s", corpus.clutter_life_min_s);
    read_field(obj, "clutter_life_max_s", corpus.clutter_life_max_s);
    read_field(obj, "frame_hz", corpus.frame_hz);
    read_field(obj, "miss_rate", corpus.miss_rate);
    read_field(obj, "false_detections_per_min", corpus.false_detections_per_min);
    if (obj.contains("bearing_noise_deg"))
        corpus.bearing_noise_rad = deg_to_rad(obj["bearing_noise_deg"].get<double>());
    if (obj.contains("calibration_bias_deg"))
        corpus.calibration_bias_rad = deg_to_rad(obj["calibration_bias_deg"].get<double>());
    if (obj.contains("bbox_half_width_deg"))
        corpus.bbox_half_width_rad = deg_to_rad(obj["bbox_half_width_deg"].get<double>());
    read_field(obj, "spawn_range_min_m", corpus.spawn_range_min_m);
    read_field(obj, "spawn_range_max_m", corpus.spawn_range_max_m);
    read_field(obj, "ped_speed_mps", corpus.ped_speed_mps);
    read_field(obj, "ped_life_min_s", corpus.ped_life_min_s);
    read_field(obj, "ped_life_max_s", corpus.ped_life_max_s);
    read_field(obj, "seed", corpus.seed);
}

json scenario_to_json(const ScenarioConfig& s) {
    json j;
    j["graph_file"] = s.graph_file;
    j["pedestrian_speed"] = {{"mean_mps", s.pedestrian_speed.mean_mps},
                             {"std_mps", s.pedestrian_speed.std_mps},
                             {"floor_mps", s.pedestrian_speed.floor_mps}};
    j["vehicle_speed_mps"] = s.vehicle_speed_mps;
    j["sensing"] = {{"range_m", s.sensing.range_m}, {"fov_deg", s.sensing.fov_deg}};
    j["duration_s"] = s.duration_s;
    j["snapshot_hz"] = s.snapshot_hz;
    j["seed"] = s.seed;
    j["vehicle_start_node"] = s.vehicle_start_node;
    j["vehicle_start_offset_m"] = s.vehicle_start_offset_m;
    j["speed_noise_std_mps"] = s.speed_noise_std_mps;
    return j;
}

json corpus_to_json(const CorpusConfig& c) {
    json j;
    j["duration_s"] = c.duration_s;
    j["pedestrian_tracks"] = c.pedestrian_tracks;
    j["pair_fraction"] = c.pair_fraction;
    j["pair_spacing_min_m"] = c.pair_spacing_min_m;
    j["pair_spacing_max_m"] = c.pair_spacing_max_m;
    j["clutter_tracks_per_min"] = c.clutter_tracks_per_min;
    j["clutter_near_fraction"] = c.clutter_near_fraction;
    j["clutter_life_min_s"] = c.clutter_life_min_s;
    j["clutter_life_max_s"] = c.clutter_life_max_s;
    j["frame_hz"] = c.frame_hz;
    j["miss_rate"] = c.miss_rate;
    j["false_detections_per_min"] = c.false_detections_per_min;
    j["bearing_noise_deg"] = rad_to_deg(c.bearing_noise_rad);
    j["calibration_bias_deg"] = rad_to_deg(c.calibration_bias_rad);
    j["bbox_half_width_deg"] = rad_to_deg(c.bbox_half_width_rad);
    j["spawn_range_min_m"] = c.spawn_range_min_m;
    j["spawn_range_max_m"] = c.spawn_range_max_m;
    j["ped_speed_mps"] = c.ped_speed_mps;
    j["ped_life_min_s"] = c.ped_life_min_s;
    j["ped_life_max_s"] = c.ped_life_max_s;
    j["seed"] = c.seed;
    return j;
}

json spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["scenario"] = scenario_to_json(spec.scenario);
    j["estimator"] = {{"alpha", spec.estimator.alpha},
                      {"fallback_speed_mps", spec.estimator.fallback_speed_mps},
                      {"window_s", spec.estimator.window_s}};
    j["corpus"] = corpus_to_json(spec.corpus);
    json e;
    e["repetitions"] = spec.repetitions;
    e["visit_counts"] = spec.visit_counts;
    e["rates_per_min"] = spec.rates_per_min;
    if (spec.route_rate_per_min) e["route_rate_per_min"] = *spec.route_rate_per_min;
    e["eval_step_s"] = spec.eval_step_s;
    e["out_dir"] = spec.out_dir.string();
    e["threads"] = spec.threads;
    j["experiment"] = e;
    return j;
}

void write_report(const ExperimentSpec& spec, const std::string& command, json results) {
    std::filesystem::create_directories(spec.out_dir);
    json report;
    report["command"] = command;
    report["config"] = spec_to_json(spec);
    report["results"] = std::move(results);
    std::ofstream out(spec.out_dir / "report.json");
    if (!out) throw DataError("cannot write " + (spec.out_dir / "report.json").string());
    out << report.dump(2) << "\n";
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::full_network: return "full-network";
        case ExperimentKind::visits_sweep: return "single-link-visits-sweep";
        case ExperimentKind::rate_sweep: return "rate-sweep";
        case ExperimentKind::roc: return "roc";
        case ExperimentKind::replay: return "hardware-replay";
    }
    return "full-network";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "full-network") return ExperimentKind::full_network;
    if (name == "single-link-visits-sweep") return ExperimentKind::visits_sweep;
    if (name == "rate-sweep") return ExperimentKind::rate_sweep;
    if (name == "roc") return ExperimentKind::roc;
    if (name == "hardware-replay") return ExperimentKind::replay;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.repetitions < 1) throw ConfigError("experiment: repetitions must be >= 1");
    if (spec.kind == ExperimentKind::visits_sweep && spec.visit_counts.empty())
        throw ConfigError("experiment: visit_counts must be non-empty");
    if (spec.kind == ExperimentKind::rate_sweep && spec.rates_per_min.empty())
        throw ConfigError("experiment: rates_per_min must be non-empty");
    if (!(spec.eval_step_s > 0.0)) throw ConfigError("experiment: eval_step_s must be > 0");
    validate_config(spec.scenario);
    validate_config(spec.estimator);
    validate_config(spec.corpus);
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(path.string() + ": top level must be an object");
    // A report document embeds its config; accept it directly.
    if (doc.contains("config")) doc = doc["config"];

    const std::string where = path.filename().string();
    reject_unknown_keys(doc, {"kind", "scenario", "estimator", "corpus", "experiment"}, where);

    ExperimentSpec spec;
    try {
        if (doc.contains("kind")) {
            spec.kind = experiment_kind_from_string(doc["kind"].get<std::string>());
        }
        if (doc.contains("scenario")) parse_scenario(doc["scenario"], spec.scenario, where + ".scenario");
        if (doc.contains("estimator")) parse_estimator(doc["estimator"], spec.estimator, where + ".estimator");
        if (doc.contains("corpus")) parse_corpus(doc["corpus"], spec.corpus, where + ".corpus");
        if (doc.contains("experiment")) {
            const json& e = doc["experiment"];
            reject_unknown_keys(e,
                                {"repetitions", "visit_counts", "rates_per_min",
                                 "route_rate_per_min", "eval_step_s", "out_dir", "threads"},
                                where + ".experiment");
            read_field(e, "repetitions", spec.repetitions);
            read_field(e, "visit_counts", spec.visit_counts);
            read_field(e, "rates_per_min", spec.rates_per_min);
            if (e.contains("route_rate_per_min"))
                spec.route_rate_per_min = e["route_rate_per_min"].get<double>();
            read_field(e, "eval_step_s", spec.eval_step_s);
            if (e.contains("out_dir")) spec.out_dir = e["out_dir"].get<std::string>();
            read_field(e, "threads", spec.threads);
        }
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return spec;
}

std::string experiment_spec_json(const ExperimentSpec& spec) {
    return spec_to_json(spec).dump(2) + "\n";
}

std::map<LinkId, std::vector<double>> link_arrival_times(
    const NetworkGraph& graph, std::span<const ArrivalEvent> arrivals,
    double duration_s) {
    // Distance walked before reaching each link of each route.
    std::map<RouteId, std::vector<std::pair<LinkId, double>>> offsets;
    for (const Route& r : graph.routes()) {
        double before = 0.0;
        auto& list = offsets[r.id];
        for (LinkId id : r.links) {
            list.emplace_back(id, before);
            before += graph.link_at(id).length_m;
        }
    }

    std::map<LinkId, std::vector<double>> times;
    for (const Link& l : graph.links()) times[l.id] = {};
    for (const ArrivalEvent& a : arrivals) {
        auto it = offsets.find(a.route);
        if (it == offsets.end()) continue;
        for (const auto& [link, before] : it->second) {
            const double t = a.time_s + before / a.speed_mps;
            if (t <= duration_s) times[link].push_back(t);
        }
    }
    for (auto& [link, list] : times) std::sort(list.begin(), list.end());
    return times;
}

NetworkGraph scenario_graph(const ExperimentSpec& spec) {
    NetworkGraph graph;
    if (spec.scenario.graph_file.empty()) {
        graph = make_benchmark_graph(spec.route_rate_per_min.value_or(1.62));
    } else {
        graph = load_validated_graph(spec.scenario.graph_file);
        if (spec.route_rate_per_min) {
            std::vector<Node> nodes = graph.nodes();
            std::vector<Link> links = graph.links();
            std::vector<Route> routes = graph.routes();
            for (Route& r : routes) r.rate_per_min = *spec.route_rate_per_min;
            graph = NetworkGraph(std::move(nodes), std::move(links), std::move(routes));
        }
    }
    return graph;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> guard(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

struct RepEstimates {
    std::map<LinkId, std::optional<RateEstimate>> moving;
    std::map<LinkId, RateEstimate> stationary;
};

RepEstimates run_one_rep(const NetworkGraph& graph, const ExperimentSpec& spec, int rep) {
    ScenarioConfig scenario = spec.scenario;
    scenario.seed = derive_seed(spec.scenario.seed, seed_stream::repetition,
                                static_cast<std::uint64_t>(rep));
    Simulation sim(graph, scenario);
    EventLog log = sim.run();
    WindowExtraction extraction = extract_windows(log.snapshots, spec.estimator);

    RepEstimates out;
    const auto stationary_times = link_arrival_times(graph, log.arrivals, scenario.duration_s);
    for (const Link& l : graph.links()) {
        auto accepted = extraction.accepted.find(l.id);
        if (accepted == extraction.accepted.end()) {
            out.moving[l.id] = std::nullopt;
        } else {
            out.moving[l.id] = estimate_rate(accepted->second, spec.estimator);
        }
        out.stationary.emplace(
            l.id, stationary_counter(l.id, stationary_times.at(l.id), scenario.duration_s,
                                     spec.estimator));
    }
    return out;
}

}  // namespace

FullNetworkReport run_full_network(const ExperimentSpec& spec) {
    validate_spec(spec);
    const NetworkGraph graph = scenario_graph(spec);
    const auto truth = link_rates(graph);

    std::vector<RepEstimates> reps(static_cast<std::size_t>(spec.repetitions));
    parallel_for(spec.repetitions, spec.threads,
                 [&](int i) { reps[static_cast<std::size_t>(i)] = run_one_rep(graph, spec, i); });

    FullNetworkReport report;
    report.repetitions = spec.repetitions;
    report.all_active_links_estimated_every_rep = true;

    for (const Link& l : graph.links()) {
        LinkAggregate agg;
        agg.link = l.id;
        agg.length_m = l.length_m;
        agg.truth_per_min = truth.at(l.id);
        agg.active = truth.at(l.id) > 0.0;

        std::vector<double> lambdas, lowers, uppers, widths;
        std::vector<double> stat_lambdas, stat_lowers, stat_uppers;
        int covered = 0, stat_covered = 0;
        for (const RepEstimates& rep : reps) {
            const auto& est = rep.moving.at(l.id);
            if (est) {
                ++agg.reps_with_estimate;
                lambdas.push_back(est->lambda_per_min);
                lowers.push_back(est->lower_per_min);
                uppers.push_back(est->upper_per_min);
                widths.push_back(est->upper_per_min - est->lower_per_min);
                if (est->lower_per_min <= agg.truth_per_min &&
                    agg.truth_per_min <= est->upper_per_min) {
                    ++covered;
                }
            } else if (agg.active) {
                report.all_active_links_estimated_every_rep = false;
            }
            const RateEstimate& stat = rep.stationary.at(l.id);
            stat_lambdas.push_back(stat.lambda_per_min);
            stat_lowers.push_back(stat.lower_per_min);
            stat_uppers.push_back(stat.upper_per_min);
            if (stat.lower_per_min <= agg.truth_per_min &&
                agg.truth_per_min <= stat.upper_per_min) {
                ++stat_covered;
            }
        }
        agg.mean_lambda = mean_of(lambdas);
        agg.mean_lower = mean_of(lowers);
        agg.mean_upper = mean_of(uppers);
        agg.mean_width = mean_of(widths);
        agg.coverage = agg.reps_with_estimate == 0
                           ? 0.0
                           : static_cast<double>(covered) / agg.reps_with_estimate;
        agg.stat_mean_lambda = mean_of(stat_lambdas);
        agg.stat_mean_lower = mean_of(stat_lowers);
        agg.stat_mean_upper = mean_of(stat_uppers);
        agg.stat_coverage = static_cast<double>(stat_covered) / spec.repetitions;
        report.links.push_back(agg);
    }

    std::vector<double> active_lengths, active_widths;
    int active_in_mean_ci = 0, active_total = 0;
    for (const LinkAggregate& agg : report.links) {
        if (!agg.active) continue;
        ++active_total;
        active_lengths.push_back(agg.length_m);
        active_widths.push_back(agg.mean_width);
        if (agg.mean_lower <= agg.truth_per_min && agg.truth_per_min <= agg.mean_upper) {
            ++active_in_mean_ci;
        }
    }
    report.active_truth_in_mean_ci =
        active_total == 0 ? 0.0 : static_cast<double>(active_in_mean_ci) / active_total;
    report.spearman_length_vs_width = spearman_rank_correlation(
        active_lengths.data(), active_widths.data(), static_cast<int>(active_lengths.size()));

    // per_link.csv mirrors the full-network comparison figure's content.
    std::filesystem::create_directories(spec.out_dir);
    std::ofstream csv(spec.out_dir / "per_link.csv");
    if (!csv) throw DataError("cannot write " + (spec.out_dir / "per_link.csv").string());
    csv << "link_id,length_m,truth_per_min,active,reps_estimated,mean_lambda,mean_lower,"
           "mean_upper,mean_width,coverage,stat_mean_lambda,stat_mean_lower,stat_mean_upper,"
           "stat_coverage\n";
    for (const LinkAggregate& a : report.links) {
        csv << a.link << ',' << format_double(a.length_m) << ','
            << format_double(a.truth_per_min) << ',' << (a.active ? 1 : 0) << ','
            << a.reps_with_estimate << ',' << format_double(a.mean_lambda) << ','
            << format_double(a.mean_lower) << ',' << format_double(a.mean_upper) << ','
            << format_double(a.mean_width) << ',' << format_double(a.coverage) << ','
            << format_double(a.stat_mean_lambda) << ',' << format_double(a.stat_mean_lower)
            << ',' << format_double(a.stat_mean_upper) << ','
            << format_double(a.stat_coverage) << "\n";
    }
    csv.close();

    json results;
    results["all_active_links_estimated_every_rep"] = report.all_active_links_estimated_every_rep;
    results["active_truth_in_mean_ci"] = report.active_truth_in_mean_ci;
    results["spearman_length_vs_width"] = report.spearman_length_vs_width;
    json seeds = json::array();
    for (int i = 0; i < spec.repetitions; ++i) {
        seeds.push_back(derive_seed(spec.scenario.seed, seed_stream::repetition,
                                    static_cast<std::uint64_t>(i)));
    }
    results["rep_seeds"] = seeds;
    write_report(spec, "full-network", results);
    return report;
}

namespace {

struct SingleLinkRep {
    std::optional<RateEstimate> estimate;
};

// One repetition of the single-link experiment: triangle scenario, target
// link 0, `visits` full traversals.
SingleLinkRep run_single_link_rep(const NetworkGraph& graph, const ExperimentSpec& spec,
                                  double duration_s, int rep) {
    ScenarioConfig scenario = spec.scenario;
    scenario.duration_s = duration_s;
    scenario.seed = derive_seed(spec.scenario.seed, seed_stream::repetition,
                                static_cast<std::uint64_t>(rep));
    Simulation sim(graph, scenario);
    EventLog log = sim.run();
    WindowExtraction extraction = extract_windows(log.snapshots, spec.estimator);
    SingleLinkRep out;
    auto it = extraction.accepted.find(0);
    if (it != extraction.accepted.end()) {
        out.estimate = estimate_rate(it->second, spec.estimator);
    }
    return out;
}

double triangle_cycle_s(const ExperimentSpec& spec) {
    if (!(spec.scenario.vehicle_speed_mps > 0.0)) {
        throw ConfigError("single-link sweeps require a moving vehicle");
    }
    return 300.0 / spec.scenario.vehicle_speed_mps;  // 3 sides x 100 m
}

}  // namespace

std::vector<VisitsSweepPoint> run_visits_sweep(const ExperimentSpec& spec) {
    validate_spec(spec);
    const double rate = spec.route_rate_per_min.value_or(1.62);
    const NetworkGraph graph = make_triangle_graph(rate);
    const double cycle = triangle_cycle_s(spec);

    std::vector<VisitsSweepPoint> points;
    for (int visits : spec.visit_counts) {
        VisitsSweepPoint point;
        point.visits = visits;
        if (visits <= 0) {
            points.push_back(point);  // no traversals, no data
            continue;
        }
        const double duration = cycle * visits;
        std::vector<SingleLinkRep> reps(static_cast<std::size_t>(spec.repetitions));
        parallel_for(spec.repetitions, spec.threads, [&](int i) {
            reps[static_cast<std::size_t>(i)] = run_single_link_rep(graph, spec, duration, i);
        });
        std::vector<double> lambdas, widths, counts, periods;
        int covered = 0;
        for (const SingleLinkRep& rep : reps) {
            if (!rep.estimate) continue;
            ++point.reps_with_data;
            lambdas.push_back(rep.estimate->lambda_per_min);
            widths.push_back(rep.estimate->upper_per_min - rep.estimate->lower_per_min);
            counts.push_back(static_cast<double>(rep.estimate->total_count));
            periods.push_back(rep.estimate->total_period_s);
            if (rep.estimate->lower_per_min <= rate && rate <= rep.estimate->upper_per_min) {
                ++covered;
            }
        }
        point.mean_lambda = mean_of(lambdas);
        point.mean_width = mean_of(widths);
        point.coverage = point.reps_with_data == 0
                             ? 0.0
                             : static_cast<double>(covered) / point.reps_with_data;
        point.mean_total_count = mean_of(counts);
        point.mean_total_period_s = mean_of(periods);
        points.push_back(point);
    }

    std::filesystem::create_directories(spec.out_dir);
    std::ofstream csv(spec.out_dir / "visits_sweep.csv");
    if (!csv) throw DataError("cannot write " + (spec.out_dir / "visits_sweep.csv").string());
    csv << "visits,reps_with_data,mean_lambda,mean_width,coverage,mean_Nc,mean_Tc_seconds\n";
    for (const VisitsSweepPoint& p : points) {
        csv << p.visits << ',' << p.reps_with_data << ',' << format_double(p.mean_lambda)
            << ',' << format_double(p.mean_width) << ',' << format_double(p.coverage) << ','
            << format_double(p.mean_total_count) << ','
            << format_double(p.mean_total_period_s) << "\n";
    }
    csv.close();

    json results = json::array();
    for (const VisitsSweepPoint& p : points) {
        results.push_back({{"visits", p.visits},
                           {"reps_with_data", p.reps_with_data},
                           {"mean_lambda", p.mean_lambda},
                           {"mean_width", p.mean_width},
                           {"coverage", p.coverage}});
    }
    write_report(spec, "sweep-visits", results);
    return points;
}

std::vector<RateSweepPoint> run_rate_sweep(const ExperimentSpec& spec) {
    validate_spec(spec);
    const int visits = spec.visit_counts.empty() ? 10 : spec.visit_counts.front();
    const double cycle = triangle_cycle_s(spec);
    const double duration = cycle * std::max(1, visits);

    std::vector<RateSweepPoint> points;
    for (double rate : spec.rates_per_min) {
        const NetworkGraph graph = make_triangle_graph(rate);
        RateSweepPoint point;
        point.rate_per_min = rate;
        std::vector<SingleLinkRep> reps(static_cast<std::size_t>(spec.repetitions));
        parallel_for(spec.repetitions, spec.threads, [&](int i) {
            reps[static_cast<std::size_t>(i)] = run_single_link_rep(graph, spec, duration, i);
        });
        std::vector<double> lambdas, widths;
        int covered = 0;
        for (const SingleLinkRep& rep : reps) {
            if (!rep.estimate) continue;
            ++point.reps_with_data;
            lambdas.push_back(rep.estimate->lambda_per_min);
            widths.push_back(rep.estimate->upper_per_min - rep.estimate->lower_per_min);
            if (rep.estimate->lower_per_min <= rate && rate <= rep.estimate->upper_per_min) {
                ++covered;
            }
        }
        point.mean_lambda = mean_of(lambdas);
        point.mean_width = mean_of(widths);
        point.coverage = point.reps_with_data == 0
                             ? 0.0
                             : static_cast<double>(covered) / point.reps_with_data;
        point.rel_error = rate > 0.0 ? std::abs(point.mean_lambda - rate) / rate : 0.0;
        points.push_back(point);
    }

    std::filesystem::create_directories(spec.out_dir);
    std::ofstream csv(spec.out_dir / "rate_sweep.csv");
    if (!csv) throw DataError("cannot write " + (spec.out_dir / "rate_sweep.csv").string());
    csv << "rate_per_min,reps_with_data,mean_lambda,mean_width,coverage,rel_error\n";
    for (const RateSweepPoint& p : points) {
        csv << format_double(p.rate_per_min) << ',' << p.reps_with_data << ','
            << format_double(p.mean_lambda) << ',' << format_double(p.mean_width) << ','
            << format_double(p.coverage) << ',' << format_double(p.rel_error) << "\n";
    }
    csv.close();

    json results = json::array();
    for (const RateSweepPoint& p : points) {
        results.push_back({{"rate_per_min", p.rate_per_min},
                           {"reps_with_data", p.reps_with_data},
                           {"mean_lambda", p.mean_lambda},
                           {"mean_width", p.mean_width},
                           {"coverage", p.coverage},
                           {"rel_error", p.rel_error}});
    }
    write_report(spec, "sweep-rates", results);
    return points;
}

RocReport run_roc(const ExperimentSpec& spec) {
    validate_spec(spec);
    constexpr double operating_budget_fp_per_min = 1.5;

    std::vector<RocSeedResult> seeds(static_cast<std::size_t>(spec.repetitions));
    std::vector<std::vector<RocPoint>> df_curves(seeds.size());
    std::vector<std::vector<RocPoint>> mlf_curves(seeds.size());
    const FusionParams params;

    parallel_for(spec.repetitions, spec.threads, [&](int i) {
        CorpusConfig config = spec.corpus;
        config.seed = derive_seed(spec.corpus.seed, seed_stream::repetition,
                                  static_cast<std::uint64_t>(i));
        const LabeledCorpus corpus = generate_detection_corpus(config);

        const HitLedger df_ledger = score_corpus(corpus, FusionMethod::distributed, params);
        const HitLedger mlf_ledger = score_corpus(corpus, FusionMethod::max_likelihood, params);
        const auto df_thresholds = natural_thresholds(df_ledger);
        const auto mlf_thresholds = natural_thresholds(mlf_ledger);
        auto df = roc_curve(corpus, FusionMethod::distributed, df_thresholds, params);
        auto mlf = roc_curve(corpus, FusionMethod::max_likelihood, mlf_thresholds, params);

        RocSeedResult result;
        result.seed = config.seed;
        result.df_dominates = roc_dominates(df, mlf);
        result.df_operating_point = best_operating_point(df, operating_budget_fp_per_min);
        result.mlf_operating_point = best_operating_point(mlf, operating_budget_fp_per_min);
        seeds[static_cast<std::size_t>(i)] = result;
        df_curves[static_cast<std::size_t>(i)] = std::move(df);
        mlf_curves[static_cast<std::size_t>(i)] = std::move(mlf);
    });

    RocReport report;
    report.seeds = seeds;
    report.df_curve = df_curves.front();
    report.mlf_curve = mlf_curves.front();

    std::filesystem::create_directories(spec.out_dir);
    auto write_curve = [&](const std::string& name, const std::vector<RocPoint>& curve) {
        std::ofstream csv(spec.out_dir / name);
        if (!csv) throw DataError("cannot write " + (spec.out_dir / name).string());
        csv << "threshold,hit_rate,fp_per_min\n";
        for (const RocPoint& p : curve) {
            csv << format_double(p.threshold) << ',' << format_double(p.hit_rate) << ','
                << format_double(p.false_positives_per_min) << "\n";
        }
    };
    write_curve("roc_df.csv", report.df_curve);
    write_curve("roc_mlf.csv", report.mlf_curve);

    json results = json::array();
    for (const RocSeedResult& r : report.seeds) {
        json jr;
        jr["seed"] = r.seed;
        jr["df_dominates"] = r.df_dominates;
        if (r.df_operating_point) {
            jr["df_hit_rate_at_budget"] = r.df_operating_point->hit_rate;
            jr["df_fp_per_min"] = r.df_operating_point->false_positives_per_min;
        }
        if (r.mlf_operating_point) {
            jr["mlf_hit_rate_at_budget"] = r.mlf_operating_point->hit_rate;
            jr["mlf_fp_per_min"] = r.mlf_operating_point->false_positives_per_min;
        }
        results.push_back(jr);
    }
    write_report(spec, "roc", results);
    return report;
}

EventLog run_simulate(const ExperimentSpec& spec) {
    validate_spec(spec);
    const NetworkGraph graph = scenario_graph(spec);
    Simulation sim(graph, spec.scenario);
    EventLog log = sim.run();
    write_event_log(log, spec.out_dir);
    std::ofstream config_out(spec.out_dir / "config.json");
    if (!config_out) throw DataError("cannot write " + (spec.out_dir / "config.json").string());
    config_out << experiment_spec_json(spec);
    return log;
}

std::vector<RateEstimate> run_estimate(const std::filesystem::path& log_dir,
                                       const EstimatorConfig& config,
                                       const std::filesystem::path& out_dir) {
    validate_config(config);
    const EventLog log = read_event_log(log_dir);
    const WindowExtraction extraction = extract_windows(log.snapshots, config);

    std::vector<RateEstimate> estimates;
    for (const auto& [link, windows] : extraction.accepted) {
        auto est = estimate_rate(windows, config);
        if (est) {
            est->eval_time_s = log.duration_s;
            estimates.push_back(*est);
        }
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "estimates.csv");
    if (!csv) throw DataError("cannot write " + (out_dir / "estimates.csv").string());
    csv << "link_id,eval_time,lambda_hat,lambda_lo,lambda_hi,Nc,Tc_seconds\n";
    for (const RateEstimate& e : estimates) {
        csv << e.link << ',' << format_double(e.eval_time_s) << ','
            << format_double(e.lambda_per_min) << ',' << format_double(e.lower_per_min)
            << ',' << format_double(e.upper_per_min) << ',' << e.total_count << ','
            << format_double(e.total_period_s) << "\n";
    }
    return estimates;
}

std::vector<ProfilePoint> run_replay(const std::filesystem::path& log_dir,
                                     const EstimatorConfig& config,
                                     double eval_step_s,
                                     const std::filesystem::path& out_dir) {
    validate_config(config);
    const EventLog log = read_event_log(log_dir);
    const WindowExtraction extraction = extract_windows(log.snapshots, config);

    std::vector<ProfilePoint> all_points;
    for (const auto& [link, windows] : extraction.accepted) {
        auto profile = rate_profile(windows, config, link, 0.0, log.duration_s, eval_step_s);
        all_points.insert(all_points.end(), profile.begin(), profile.end());
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "profiles.csv");
    if (!csv) throw DataError("cannot write " + (out_dir / "profiles.csv").string());
    csv << "link_id,eval_time,lambda_hat,lambda_lo,lambda_hi,Nc,Tc_seconds,window_clipped\n";
    for (const ProfilePoint& p : all_points) {
        csv << p.link << ',' << format_double(p.eval_time_s) << ',';
        if (p.estimate) {
            csv << format_double(p.estimate->lambda_per_min) << ','
                << format_double(p.estimate->lower_per_min) << ','
                << format_double(p.estimate->upper_per_min) << ','
                << p.estimate->total_count << ','
                << format_double(p.estimate->total_period_s) << ',';
        } else {
            csv << ",,,,,";  // gap
        }
        csv << (p.window_clipped ? 1 : 0) << "\n";
    }
    return all_points;
}

}  // namespace pedflow
