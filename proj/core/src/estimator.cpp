// SPDX-License-Identifier: Apache-2.0
#include "pedflow/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pedflow/errors.hpp"
#include "pedflow/stats.hpp"

namespace pedflow {

void validate_config(const EstimatorConfig& config) {
    auto fail = [](const std::string& msg) { throw ConfigError("estimator: " + msg); };
    if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) fail("alpha must be in (0, 1)");
    if (!(config.fallback_speed_mps > 0.0)) fail("fallback_speed_mps must be > 0");
    if (!(config.window_s > 0.0)) fail("window_s must be > 0");
}

double space_mean_speed(std::span<const double> speeds_mps) {
    if (speeds_mps.empty()) {
        throw std::invalid_argument("space_mean_speed: empty speed list");
    }
    double inv_sum = 0.0;
    for (double v : speeds_mps) {
        if (!(v > 0.0)) throw std::invalid_argument("space_mean_speed: speeds must be > 0");
        inv_sum += 1.0 / v;
    }
    return static_cast<double>(speeds_mps.size()) / inv_sum;
}

ObservationWindow window_from_snapshot(const SensingSnapshot& snapshot,
                                       const EstimatorConfig& config) {
    if (!(snapshot.x1_m > snapshot.x2_m) || snapshot.x2_m < 0.0) {
        throw std::invalid_argument("window_from_snapshot: requires x1 > x2 >= 0");
    }
    ObservationWindow w;
    w.link = snapshot.link;
    w.count = static_cast<int>(snapshot.pedestrians.size());
    w.snapshot_time_s = snapshot.time_s;
    if (snapshot.pedestrians.empty()) {
        w.speed_mps = config.fallback_speed_mps;
    } else {
        std::vector<double> speeds;
        speeds.reserve(snapshot.pedestrians.size());
        for (const SnapshotPed& p : snapshot.pedestrians) speeds.push_back(p.speed_mps);
        w.speed_mps = space_mean_speed(speeds);
    }
    w.t1_s = snapshot.time_s - snapshot.x1_m / w.speed_mps;
    w.t2_s = snapshot.time_s - snapshot.x2_m / w.speed_mps;
    w.period_s = w.t2_s - w.t1_s;
    return w;
}

bool IndependenceLedger::accept(const ObservationWindow& window) {
    auto& intervals = accepted_[window.link];
    // First interval starting at or after t1, and its predecessor, are the
    // only overlap candidates.
    auto next = intervals.lower_bound(window.t1_s);
    if (next != intervals.end() && next->first < window.t2_s) return false;
    if (next != intervals.begin()) {
        auto prev = std::prev(next);
        if (prev->second > window.t1_s) return false;
    }
    intervals.emplace(window.t1_s, window.t2_s);
    return true;
}

bool IndependenceLedger::interiors_disjoint() const {
    for (const auto& [link, intervals] : accepted_) {
        double prev_end = -std::numeric_limits<double>::infinity();
        for (const auto& [t1, t2] : intervals) {
            if (t1 < prev_end) return false;
            prev_end = t2;
        }
    }
    return true;
}

const std::map<double, double>* IndependenceLedger::intervals(LinkId link) const {
    auto it = accepted_.find(link);
    return it == accepted_.end() ? nullptr : &it->second;
}

std::optional<RateEstimate> estimate_rate(std::span<const ObservationWindow> windows,
                                          const EstimatorConfig& config) {
    if (windows.empty()) return std::nullopt;
    long long total_count = 0;
    double total_period_s = 0.0;
    double latest = windows.front().snapshot_time_s;
    for (const ObservationWindow& w : windows) {
        total_count += w.count;
        total_period_s += w.period_s;
        latest = std::max(latest, w.snapshot_time_s);
    }
    if (!(total_period_s > 0.0)) return std::nullopt;

    RateEstimate est;
    est.link = windows.front().link;
    est.eval_time_s = latest;
    est.total_count = total_count;
    est.total_period_s = total_period_s;
    const double n = static_cast<double>(total_count);
    est.lambda_per_min = 60.0 * n / total_period_s;
    est.lower_per_min =
        60.0 * chi_squared_quantile(config.alpha / 2.0, 2.0 * n) / (2.0 * total_period_s);
    est.upper_per_min =
        60.0 * chi_squared_quantile(1.0 - config.alpha / 2.0, 2.0 * n + 2.0) /
        (2.0 * total_period_s);
    return est;
}

std::vector<ProfilePoint> rate_profile(std::span<const ObservationWindow> windows,
                                       const EstimatorConfig& config,
                                       LinkId link, double t_begin, double t_end,
                                       double eval_step_s) {
    if (!(eval_step_s > 0.0)) throw std::invalid_argument("rate_profile: eval step must be > 0");
    if (!(config.window_s > 0.0)) throw std::invalid_argument("rate_profile: window must be > 0");

    std::vector<ProfilePoint> profile;
    const double half = config.window_s / 2.0;
    for (double te = t_begin; te <= t_end + 1e-9; te += eval_step_s) {
        ProfilePoint point;
        point.link = link;
        point.eval_time_s = te;
        point.window_clipped = (te - half < t_begin) || (te + half > t_end);
        std::vector<ObservationWindow> in_range;
        for (const ObservationWindow& w : windows) {
            if (w.link == link && std::abs(w.snapshot_time_s - te) <= half) {
                in_range.push_back(w);
            }
        }
        point.estimate = estimate_rate(in_range, config);
        if (point.estimate) point.estimate->eval_time_s = te;
        profile.push_back(std::move(point));
    }
    return profile;
}

RateEstimate stationary_counter(LinkId link, std::span<const double> arrival_times_s,
                                double duration_s, const EstimatorConfig& config) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("stationary_counter: duration must be > 0");
    ObservationWindow w;
    w.link = link;
    w.count = static_cast<int>(
        std::count_if(arrival_times_s.begin(), arrival_times_s.end(),
                      [duration_s](double t) { return t >= 0.0 && t <= duration_s; }));
    w.t1_s = 0.0;
    w.t2_s = duration_s;
    w.period_s = duration_s;
    w.snapshot_time_s = duration_s;
    auto est = estimate_rate(std::span(&w, 1), config);
    est->eval_time_s = duration_s;
    return *est;
}

WindowExtraction extract_windows(std::span<const SensingSnapshot> snapshots,
                                 const EstimatorConfig& config) {
    WindowExtraction out;
    for (const SensingSnapshot& snap : snapshots) {
        ObservationWindow w = window_from_snapshot(snap, config);
        if (out.ledger.accept(w)) {
            out.accepted[w.link].push_back(w);
        } else {
            out.rejected.push_back(w);
        }
    }
    return out;
}

}  // namespace pedflow
