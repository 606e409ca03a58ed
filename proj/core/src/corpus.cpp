// SPDX-License-Identifier: Apache-2.0
#include "pedflow/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pedflow/csv.hpp"
#include "pedflow/rng.hpp"

namespace pedflow {

void validate_config(const CorpusConfig& config) {
    auto fail = [](const std::string& msg) { throw ConfigError("corpus: " + msg); };
    if (!(config.duration_s > 0.0)) fail("duration_s must be > 0");
    if (config.pedestrian_tracks < 0) fail("pedestrian_tracks must be >= 0");
    if (config.pair_fraction < 0.0 || config.pair_fraction > 1.0)
        fail("pair_fraction must be in [0, 1]");
    if (config.clutter_tracks_per_min < 0.0) fail("clutter_tracks_per_min must be >= 0");
    if (config.clutter_near_fraction < 0.0 || config.clutter_near_fraction > 1.0)
        fail("clutter_near_fraction must be in [0, 1]");
    if (!(config.frame_hz > 0.0)) fail("frame_hz must be > 0");
    if (config.miss_rate < 0.0 || config.miss_rate >= 1.0) fail("miss_rate must be in [0, 1)");
    if (config.false_detections_per_min < 0.0) fail("false_detections_per_min must be >= 0");
    if (config.bearing_noise_rad < 0.0) fail("bearing_noise_rad must be >= 0");
    if (config.bbox_half_width_rad < 0.0) fail("bbox_half_width_rad must be >= 0");
    if (!(config.spawn_range_min_m > 0.0) ||
        !(config.spawn_range_max_m > config.spawn_range_min_m))
        fail("spawn range must satisfy 0 < min < max");
    if (!(config.ped_speed_mps > 0.0)) fail("ped_speed_mps must be > 0");
    if (!(config.ped_life_min_s > 0.0) || config.ped_life_max_s < config.ped_life_min_s)
        fail("pedestrian lifetime bounds are invalid");
    if (!(config.clutter_life_min_s > 0.0) ||
        config.clutter_life_max_s < config.clutter_life_min_s)
        fail("clutter lifetime bounds are invalid");
}

CorpusConfig zero_noise_corpus_config() {
    CorpusConfig config;
    config.pair_fraction = 0.0;
    config.clutter_tracks_per_min = 0.0;
    config.miss_rate = 0.0;
    config.false_detections_per_min = 0.0;
    config.bearing_noise_rad = 0.0;
    config.calibration_bias_rad = 0.0;
    return config;
}

namespace {

struct MovingTrack {
    int id = 0;
    bool is_pedestrian = false;
    double start_s = 0.0;
    double end_s = 0.0;
    Vec2 start_position;
    Vec2 velocity;  ///< zero for clutter

    bool alive(double t) const { return t >= start_s && t <= end_s; }
    Vec2 position(double t) const { return start_position + (t - start_s) * velocity; }
};

int camera_for_bearing(double bearing_rad) {
    const double turn = (wrap_angle(bearing_rad) + std::numbers::pi) / (2.0 * std::numbers::pi);
    return std::min(2, static_cast<int>(turn * 3.0));
}

}  // namespace

LabeledCorpus generate_detection_corpus(const CorpusConfig& config) {
    validate_config(config);
    Rng rng(derive_seed(config.seed, seed_stream::corpus));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto uniform_in = [&](double lo, double hi) { return lo + (hi - lo) * uniform(rng); };

    LabeledCorpus corpus;
    corpus.duration_s = config.duration_s;
    corpus.frame_hz = config.frame_hz;

    std::vector<MovingTrack> tracks;
    int next_id = 0;

    // Foot traffic concentrates on a few walkways crossing the sensed area,
    // so clusters interact at campus-like densities instead of spreading
    // thinly around the full circle. Each walkway is a chord of the sensing
    // annulus.
    struct Walkway {
        Vec2 foot;   // closest point to the sensor
        Vec2 dir;    // unit direction along the walkway
        double half_extent_m;
    };
    constexpr int n_walkways = 3;
    std::vector<Walkway> walkways;
    for (int w = 0; w < n_walkways; ++w) {
        const double along_angle = uniform_in(-std::numbers::pi, std::numbers::pi);
        const double offset = uniform_in(3.0, 0.6 * config.spawn_range_max_m);
        Walkway walk;
        walk.dir = unit_from_angle(along_angle);
        walk.foot = offset * unit_from_angle(along_angle + std::numbers::pi / 2.0);
        walk.half_extent_m =
            std::sqrt(std::max(1.0, config.spawn_range_max_m * config.spawn_range_max_m -
                                        offset * offset));
        walkways.push_back(walk);
    }

    const int n_pairs =
        static_cast<int>(std::lround(config.pedestrian_tracks * config.pair_fraction / 2.0));
    int spawned = 0;
    auto spawn_pedestrian = [&](double start, double life, Vec2 position, Vec2 velocity) {
        MovingTrack t;
        t.id = next_id++;
        t.is_pedestrian = true;
        t.start_s = start;
        t.end_s = std::min(start + life, config.duration_s);
        t.start_position = position;
        t.velocity = velocity;
        tracks.push_back(t);
        ++spawned;
    };
    // One walker on a walkway: position along the chord, direction and the
    // lifetime clipped so the path never leaves the chord.
    auto draw_walk = [&]() {
        const Walkway& walk =
            walkways[static_cast<std::size_t>(rng() % walkways.size())];
        double life = uniform_in(config.ped_life_min_s, config.ped_life_max_s);
        const double start = uniform_in(0.0, std::max(1e-6, config.duration_s - life));
        const double heading = uniform(rng) < 0.5 ? 1.0 : -1.0;
        const double speed = config.ped_speed_mps + uniform_in(-0.3, 0.3);
        const double along = uniform_in(-walk.half_extent_m, walk.half_extent_m);
        const double to_exit = walk.half_extent_m - heading * along;
        life = std::min(life, std::max(2.0, to_exit / speed));
        const Vec2 position = walk.foot + along * walk.dir;
        const Vec2 velocity = (heading * speed) * walk.dir;
        return std::tuple{start, life, position, velocity};
    };
    // Companions walk in file: the second member follows the first at a
    // fixed gap along the shared walkway.
    for (int p = 0; p < n_pairs && spawned + 2 <= config.pedestrian_tracks; ++p) {
        auto [start, life, position, velocity] = draw_walk();
        const double spacing = uniform_in(config.pair_spacing_min_m, config.pair_spacing_max_m);
        const double vnorm = std::max(1e-9, norm(velocity));
        const Vec2 offset = (-spacing / vnorm) * velocity;
        spawn_pedestrian(start, life, position, velocity);
        spawn_pedestrian(start, life, position + offset, velocity);
    }
    while (spawned < config.pedestrian_tracks) {
        auto [start, life, position, velocity] = draw_walk();
        spawn_pedestrian(start, life, position, velocity);
    }
    const int n_pedestrians = spawned;

    // Clutter: static objects tracked for a bounded lifetime. A configurable
    // fraction lines the walkways at a minimum clearance off the path center
    // (poles and bushes flank walkways, not their middle); the rest scatters
    // over the annulus.
    const int n_clutter = static_cast<int>(
        std::lround(config.clutter_tracks_per_min * config.duration_s / 60.0));
    constexpr double clearance_m = 1.5;
    for (int c = 0; c < n_clutter; ++c) {
        MovingTrack t;
        t.id = next_id++;
        t.is_pedestrian = false;
        const double life = uniform_in(config.clutter_life_min_s, config.clutter_life_max_s);
        t.start_s = uniform_in(0.0, std::max(1e-6, config.duration_s - life));
        t.end_s = std::min(t.start_s + life, config.duration_s);
        if (uniform(rng) < config.clutter_near_fraction) {
            const Walkway& walk =
                walkways[static_cast<std::size_t>(rng() % walkways.size())];
            const double along = uniform_in(-walk.half_extent_m, walk.half_extent_m);
            const double side = uniform(rng) < 0.5 ? 1.0 : -1.0;
            const double lateral = side * uniform_in(clearance_m, clearance_m + 2.5);
            const Vec2 normal{-walk.dir.y, walk.dir.x};
            t.start_position = walk.foot + along * walk.dir + lateral * normal;
        } else {
            const double b = uniform_in(-std::numbers::pi, std::numbers::pi);
            const double r = uniform_in(config.spawn_range_min_m, config.spawn_range_max_m);
            t.start_position = r * unit_from_angle(b);
        }
        tracks.push_back(t);
    }

    // Sampled trajectories at exact frame instants.
    for (const MovingTrack& t : tracks) {
        ClusterTrack out;
        out.id = t.id;
        out.is_pedestrian = t.is_pedestrian;
        const long long k_first = static_cast<long long>(std::ceil(t.start_s * config.frame_hz - 1e-9));
        const long long k_last = static_cast<long long>(std::floor(t.end_s * config.frame_hz + 1e-9));
        for (long long k = std::max(0LL, k_first); k <= k_last; ++k) {
            const double time = static_cast<double>(k) / config.frame_hz;
            if (time > config.duration_s) break;
            out.points.push_back({time, t.position(time)});
        }
        if (!out.points.empty()) corpus.tracks.push_back(std::move(out));
    }

    // Detection stream, frame by frame: per-pedestrian bounding boxes with
    // miss rate, bias and noise, plus vision false positives that mostly
    // fire on clutter.
    std::normal_distribution<double> bearing_noise(0.0, 1.0);
    const double false_per_frame =
        config.false_detections_per_min / 60.0 / config.frame_hz;
    // Detection gets harder with distance: pedestrians shrink in the image.
    // The configured miss rate applies at the near edge and grows with range.
    auto miss_probability = [&config](double range) {
        const double span =
            std::max(1e-9, config.spawn_range_max_m - config.spawn_range_min_m);
        const double far = (range - config.spawn_range_min_m) / span;
        return std::min(0.9, config.miss_rate * (1.0 + 3.5 * std::clamp(far, 0.0, 1.0)));
    };
    const long long frames = static_cast<long long>(std::floor(config.duration_s * config.frame_hz));
    for (long long k = 0; k <= frames; ++k) {
        const double time = static_cast<double>(k) / config.frame_hz;
        for (const MovingTrack& t : tracks) {
            if (!t.is_pedestrian || !t.alive(time)) continue;
            if (uniform(rng) < miss_probability(norm(t.position(time)))) continue;
            const double true_bearing = bearing({0.0, 0.0}, t.position(time));
            double mid = true_bearing + config.calibration_bias_rad;
            if (config.bearing_noise_rad > 0.0) {
                mid += config.bearing_noise_rad * bearing_noise(rng);
            }
            BBoxDetection det;
            det.time_s = time;
            det.camera = camera_for_bearing(mid);
            det.left_rad = mid - config.bbox_half_width_rad;
            det.mid_rad = mid;
            det.right_rad = mid + config.bbox_half_width_rad;
            det.source_cluster = t.id;
            corpus.detections.push_back(det);
        }
        if (false_per_frame > 0.0 && uniform(rng) < false_per_frame) {
            std::vector<const MovingTrack*> alive_clutter;
            for (const MovingTrack& t : tracks) {
                if (!t.is_pedestrian && t.alive(time)) alive_clutter.push_back(&t);
            }
            double mid;
            if (!alive_clutter.empty() && uniform(rng) < 0.7) {
                const auto* t = alive_clutter[static_cast<std::size_t>(
                    uniform_in(0.0, static_cast<double>(alive_clutter.size()) - 1e-9))];
                mid = bearing({0.0, 0.0}, t->position(time)) +
                      deg_to_rad(1.0) * bearing_noise(rng);
            } else {
                mid = uniform_in(-std::numbers::pi, std::numbers::pi);
            }
            BBoxDetection det;
            det.time_s = time;
            det.camera = camera_for_bearing(mid);
            det.left_rad = mid - config.bbox_half_width_rad;
            det.mid_rad = mid;
            det.right_rad = mid + config.bbox_half_width_rad;
            det.source_cluster = -1;
            corpus.detections.push_back(det);
        }
    }

    return corpus;
}

void write_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::ofstream clusters(dir / "cluster.csv");
    if (!clusters) throw DataError("cannot write " + (dir / "cluster.csv").string());
    clusters << "time,id,x,y,truth\n";
    for (const ClusterTrack& t : corpus.tracks) {
        for (const TrackPoint& p : t.points) {
            clusters << format_double(p.time_s) << ',' << t.id << ','
                     << format_double(p.position.x) << ',' << format_double(p.position.y)
                     << ',' << (t.is_pedestrian ? 1 : 0) << "\n";
        }
    }

    std::ofstream boxes(dir / "bbox.csv");
    if (!boxes) throw DataError("cannot write " + (dir / "bbox.csv").string());
    boxes << "time,camera,left_rad,mid_rad,right_rad\n";
    for (const BBoxDetection& d : corpus.detections) {
        boxes << format_double(d.time_s) << ',' << d.camera << ','
              << format_double(d.left_rad) << ',' << format_double(d.mid_rad) << ','
              << format_double(d.right_rad) << "\n";
    }

    std::ofstream meta(dir / "meta.json");
    if (!meta) throw DataError("cannot write " + (dir / "meta.json").string());
    nlohmann::json j;
    j["duration_s"] = corpus.duration_s;
    j["frame_hz"] = corpus.frame_hz;
    meta << j.dump(2) << "\n";
}

LabeledCorpus read_corpus(const std::filesystem::path& dir) {
    LabeledCorpus corpus;

    const auto meta_path = dir / "meta.json";
    {
        std::ifstream in(meta_path);
        if (!in) throw DataError("cannot open " + meta_path.string());
        try {
            nlohmann::json j = nlohmann::json::parse(in);
            corpus.duration_s = j.at("duration_s").get<double>();
            corpus.frame_hz = j.at("frame_hz").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(meta_path.string() + ": " + e.what());
        }
    }

    {
        const auto path = dir / "cluster.csv";
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path.string());
        std::string line;
        if (!std::getline(in, line) || line != "time,id,x,y,truth") {
            throw DataError(path.filename().string() + ":1: schema mismatch");
        }
        std::map<int, std::size_t> index;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            const std::string where = path.filename().string() + ":" + std::to_string(line_no);
            if (fields.size() != 5) throw DataError(where + ": expected 5 fields");
            const int id = static_cast<int>(parse_csv_int(fields[1], where));
            auto [it, inserted] = index.emplace(id, corpus.tracks.size());
            if (inserted) {
                ClusterTrack t;
                t.id = id;
                t.is_pedestrian = parse_csv_int(fields[4], where) != 0;
                corpus.tracks.push_back(std::move(t));
            }
            corpus.tracks[it->second].points.push_back(
                {parse_csv_double(fields[0], where),
                 {parse_csv_double(fields[2], where), parse_csv_double(fields[3], where)}});
        }
    }

    {
        const auto path = dir / "bbox.csv";
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path.string());
        std::string line;
        if (!std::getline(in, line) || line != "time,camera,left_rad,mid_rad,right_rad") {
            throw DataError(path.filename().string() + ":1: schema mismatch");
        }
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            const std::string where = path.filename().string() + ":" + std::to_string(line_no);
            if (fields.size() != 5) throw DataError(where + ": expected 5 fields");
            BBoxDetection d;
            d.time_s = parse_csv_double(fields[0], where);
            d.camera = static_cast<int>(parse_csv_int(fields[1], where));
            d.left_rad = parse_csv_double(fields[2], where);
            d.mid_rad = parse_csv_double(fields[3], where);
            d.right_rad = parse_csv_double(fields[4], where);
            corpus.detections.push_back(d);
        }
    }

    return corpus;
}

}  // namespace pedflow
