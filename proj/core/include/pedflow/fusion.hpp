// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pedflow/geometry.hpp"

namespace pedflow {

struct FusionParams {
    /// Variance of the partial-hit kernel, radians^2. The alignment distance
    /// sums three vector distances, so a cluster misaligned by u beyond the
    /// box half-width scores d = 3u; (5 deg)^2 puts the e^-1 decay near the
    /// summed distance of a ~2.4 degree misalignment.
    double sigma_rad2 = deg_to_rad(5.0) * deg_to_rad(5.0);
    /// Clusters whose bearing is within this distance of a detection's
    /// middle vector participate in scoring.
    double gate_rad = deg_to_rad(10.0);
    /// Map-frame position the cluster bearings are measured from.
    Vec2 sensor_position{0.0, 0.0};
};

/// Gaussian partial hit exp(-d^2 / (2 sigma)): 1 at perfect alignment,
/// strictly decreasing in d. Throws std::invalid_argument for sigma <= 0 or
/// d < 0.
double partial_hit(double distance_rad, double sigma_rad2);

/// One tracked cluster at one frame, reduced to its bearing from the sensor.
struct ClusterObs {
    int cluster_id = 0;
    double bearing_rad = 0.0;
};

/// Left/middle/right bounding-box edge bearings of one detection, projected
/// into the map frame. Bearings satisfy left <= mid <= right as reals.
struct BBoxDetection {
    double time_s = 0.0;
    int camera = 0;
    double left_rad = 0.0;
    double mid_rad = 0.0;
    double right_rad = 0.0;
    int source_cluster = -1;  ///< generator bookkeeping; ignored by scoring
};

/// Per-cluster accumulated hit scores. Totals never decay; clutter
/// suppression comes from small addends, not forgetting.
class HitLedger {
public:
    void add(int cluster_id, double hit);
    double total(int cluster_id) const;  ///< 0 for never-scored clusters
    const std::map<int, double>& totals() const { return totals_; }

private:
    std::map<int, double> totals_;
};

/// Sum of angular distances from a cluster bearing to the three bounding-box
/// vectors of a detection: the alignment distance d of the hit kernel.
double alignment_distance(double cluster_bearing_rad, const BBoxDetection& detection);

/// Distributed fusion: every cluster within the angular gate of a detection
/// receives partial_hit(d, sigma). Equidistant clusters receive identical
/// partial hits.
void score_frame_df(std::span<const ClusterObs> clusters,
                    std::span<const BBoxDetection> detections,
                    const FusionParams& params, HitLedger& ledger);

/// Maximum-likelihood fusion: per detection, only the best-aligned gated
/// cluster gains a unit hit; ties break to the lowest cluster id.
void score_frame_mlf(std::span<const ClusterObs> clusters,
                     std::span<const BBoxDetection> detections,
                     const FusionParams& params, HitLedger& ledger);

/// Cluster ids with accumulated total >= threshold, ascending.
std::vector<int> classify(const HitLedger& ledger, double threshold);

struct TrackPoint {
    double time_s = 0.0;
    Vec2 position;
};

/// Cluster trajectory in the map frame with its ground-truth label. The
/// label is generator bookkeeping, hidden from the classifiers.
struct ClusterTrack {
    int id = 0;
    bool is_pedestrian = false;
    std::vector<TrackPoint> points;  ///< strictly increasing timestamps
};

/// Synthetic stand-in for a recorded detection dataset: cluster tracks plus
/// the bounding-box detection stream, with ground truth attached.
struct LabeledCorpus {
    double duration_s = 0.0;
    double frame_hz = 10.0;
    std::vector<ClusterTrack> tracks;
    std::vector<BBoxDetection> detections;
};

enum class FusionMethod { distributed, max_likelihood };

struct RocPoint {
    double threshold = 0.0;
    double hit_rate = 0.0;  ///< fraction of true pedestrian tracks classified
    double false_positives_per_min = 0.0;
};

/// Runs one fusion method over every frame of the corpus in time order and
/// returns the final per-track totals.
HitLedger score_corpus(const LabeledCorpus& corpus, FusionMethod method,
                       const FusionParams& params);

/// Every distinct achievable operating threshold: 0, each distinct final
/// total, and one value above the maximum (the empty classification).
std::vector<double> natural_thresholds(const HitLedger& ledger);

/// One RocPoint per threshold. A track counts as a hit if it is classified
/// as a pedestrian at any time during its life; since totals never decay,
/// that is equivalent to thresholding its final total. Throws
/// std::invalid_argument on a zero-duration corpus.
std::vector<RocPoint> roc_curve(const LabeledCorpus& corpus, FusionMethod method,
                                std::span<const double> thresholds,
                                const FusionParams& params);

/// True when `upper`'s linearly interpolated hit rate is >= `lower`'s at
/// every false-positive rate in their common support (within tol).
bool roc_dominates(std::span<const RocPoint> upper, std::span<const RocPoint> lower,
                   double tol = 1e-9);

/// Highest-hit-rate point with false positives <= budget, if any.
std::optional<RocPoint> best_operating_point(std::span<const RocPoint> curve,
                                             double max_fp_per_min);

}  // namespace pedflow
