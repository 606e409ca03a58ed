// SPDX-License-Identifier: Apache-2.0
#include "pedflow/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pedflow {

double partial_hit(double distance_rad, double sigma_rad2) {
    if (!(sigma_rad2 > 0.0)) throw std::invalid_argument("partial_hit: sigma must be > 0");
    if (distance_rad < 0.0) throw std::invalid_argument("partial_hit: distance must be >= 0");
    return std::exp(-(distance_rad * distance_rad) / (2.0 * sigma_rad2));
}

void HitLedger::add(int cluster_id, double hit) {
    if (!(hit >= 0.0)) throw std::invalid_argument("HitLedger::add: hit must be >= 0");
    totals_[cluster_id] += hit;
}

double HitLedger::total(int cluster_id) const {
    auto it = totals_.find(cluster_id);
    return it == totals_.end() ? 0.0 : it->second;
}

double alignment_distance(double cluster_bearing_rad, const BBoxDetection& detection) {
    return angular_distance(cluster_bearing_rad, detection.left_rad) +
           angular_distance(cluster_bearing_rad, detection.mid_rad) +
           angular_distance(cluster_bearing_rad, detection.right_rad);
}

void score_frame_df(std::span<const ClusterObs> clusters,
                    std::span<const BBoxDetection> detections,
                    const FusionParams& params, HitLedger& ledger) {
    for (const BBoxDetection& det : detections) {
        for (const ClusterObs& cluster : clusters) {
            if (angular_distance(cluster.bearing_rad, det.mid_rad) > params.gate_rad) continue;
            const double d = alignment_distance(cluster.bearing_rad, det);
            ledger.add(cluster.cluster_id, partial_hit(d, params.sigma_rad2));
        }
    }
}

void score_frame_mlf(std::span<const ClusterObs> clusters,
                     std::span<const BBoxDetection> detections,
                     const FusionParams& params, HitLedger& ledger) {
    for (const BBoxDetection& det : detections) {
        std::optional<int> best_id;
        double best_d = 0.0;
        for (const ClusterObs& cluster : clusters) {
            if (angular_distance(cluster.bearing_rad, det.mid_rad) > params.gate_rad) continue;
            const double d = alignment_distance(cluster.bearing_rad, det);
            if (!best_id || d < best_d ||
                (d == best_d && cluster.cluster_id < *best_id)) {
                best_id = cluster.cluster_id;
                best_d = d;
            }
        }
        if (best_id) ledger.add(*best_id, 1.0);
    }
}

std::vector<int> classify(const HitLedger& ledger, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("classify: threshold must be >= 0");
    std::vector<int> pedestrians;
    for (const auto& [id, total] : ledger.totals()) {
        if (total >= threshold) pedestrians.push_back(id);
    }
    return pedestrians;
}

namespace {

struct Frame {
    std::vector<ClusterObs> clusters;
    std::vector<BBoxDetection> detections;
};

std::map<long long, Frame> build_frames(const LabeledCorpus& corpus,
                                        const FusionParams& params) {
    std::map<long long, Frame> frames;
    for (const ClusterTrack& track : corpus.tracks) {
        for (const TrackPoint& point : track.points) {
            const long long k = std::llround(point.time_s * corpus.frame_hz);
            frames[k].clusters.push_back(
                {track.id, bearing(params.sensor_position, point.position)});
        }
    }
    for (const BBoxDetection& det : corpus.detections) {
        const long long k = std::llround(det.time_s * corpus.frame_hz);
        frames[k].detections.push_back(det);
    }
    return frames;
}

}  // namespace

HitLedger score_corpus(const LabeledCorpus& corpus, FusionMethod method,
                       const FusionParams& params) {
    HitLedger ledger;
    for (const auto& [frame_id, frame] : build_frames(corpus, params)) {
        if (method == FusionMethod::distributed) {
            score_frame_df(frame.clusters, frame.detections, params, ledger);
        } else {
            score_frame_mlf(frame.clusters, frame.detections, params, ledger);
        }
    }
    return ledger;
}

std::vector<double> natural_thresholds(const HitLedger& ledger) {
    std::vector<double> thresholds{0.0};
    double max_total = 0.0;
    for (const auto& [id, total] : ledger.totals()) {
        thresholds.push_back(total);
        max_total = std::max(max_total, total);
    }
    thresholds.push_back(max_total + 1.0);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    return thresholds;
}

std::vector<RocPoint> roc_curve(const LabeledCorpus& corpus, FusionMethod method,
                                std::span<const double> thresholds,
                                const FusionParams& params) {
    if (!(corpus.duration_s > 0.0)) {
        throw std::invalid_argument("roc_curve: corpus duration must be > 0");
    }
    const HitLedger ledger = score_corpus(corpus, method, params);

    long long true_tracks = 0;
    for (const ClusterTrack& t : corpus.tracks) {
        if (t.is_pedestrian) ++true_tracks;
    }

    std::vector<RocPoint> curve;
    const double minutes = corpus.duration_s / 60.0;
    for (double threshold : thresholds) {
        long long hits = 0;
        long long false_positives = 0;
        for (const ClusterTrack& t : corpus.tracks) {
            const bool classified = ledger.total(t.id) >= threshold &&
                                    ledger.totals().contains(t.id);
            if (!classified) continue;
            if (t.is_pedestrian) {
                ++hits;
            } else {
                ++false_positives;
            }
        }
        RocPoint point;
        point.threshold = threshold;
        point.hit_rate = true_tracks == 0
                             ? 0.0
                             : static_cast<double>(hits) / static_cast<double>(true_tracks);
        point.false_positives_per_min = static_cast<double>(false_positives) / minutes;
        curve.push_back(point);
    }
    return curve;
}

namespace {

// Hit rate as a function of false positives per minute: max hit at each
// distinct fp value, linearly interpolated between them.
struct RocInterp {
    std::vector<double> fp;
    std::vector<double> hit;

    explicit RocInterp(std::span<const RocPoint> curve) {
        std::map<double, double> best;
        for (const RocPoint& p : curve) {
            auto [it, inserted] = best.emplace(p.false_positives_per_min, p.hit_rate);
            if (!inserted) it->second = std::max(it->second, p.hit_rate);
        }
        for (const auto& [f, h] : best) {
            fp.push_back(f);
            hit.push_back(h);
        }
    }

    double operator()(double f) const {
        if (fp.empty()) return 0.0;
        if (f <= fp.front()) return hit.front();
        if (f >= fp.back()) return hit.back();
        const auto it = std::upper_bound(fp.begin(), fp.end(), f);
        const std::size_t j = static_cast<std::size_t>(it - fp.begin());
        const double w = (f - fp[j - 1]) / (fp[j] - fp[j - 1]);
        return hit[j - 1] + w * (hit[j] - hit[j - 1]);
    }
};

}  // namespace

bool roc_dominates(std::span<const RocPoint> upper, std::span<const RocPoint> lower,
                   double tol) {
    if (upper.empty() || lower.empty()) return false;
    const RocInterp up(upper);
    const RocInterp low(lower);
    const double support_lo = std::max(up.fp.front(), low.fp.front());
    const double support_hi = std::min(up.fp.back(), low.fp.back());
    auto check_at = [&](double f) { return up(f) >= low(f) - tol; };
    for (double f : up.fp) {
        if (f >= support_lo && f <= support_hi && !check_at(f)) return false;
    }
    for (double f : low.fp) {
        if (f >= support_lo && f <= support_hi && !check_at(f)) return false;
    }
    return true;
}

std::optional<RocPoint> best_operating_point(std::span<const RocPoint> curve,
                                             double max_fp_per_min) {
    std::optional<RocPoint> best;
    for (const RocPoint& p : curve) {
        if (p.false_positives_per_min > max_fp_per_min) continue;
        if (!best || p.hit_rate > best->hit_rate) best = p;
    }
    return best;
}

}  // namespace pedflow
