// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pedflow/simkit.hpp"

namespace pedflow {

struct EstimatorConfig {
    double alpha = 0.1;               ///< 100(1-alpha)% confidence intervals
    double fallback_speed_mps = 1.5;  ///< expected speed used for empty windows
    double window_s = 600.0;          ///< moving-average window for profiles
};

/// Throws ConfigError when any parameter is out of range.
void validate_config(const EstimatorConfig& config);

/// One independent moving-observer measurement: a pedestrian count and the
/// projected interval of origin-node arrival times consistent with it.
struct ObservationWindow {
    LinkId link = 0;
    int count = 0;
    double t1_s = 0.0;           ///< projected arrival of the far window bound
    double t2_s = 0.0;           ///< projected arrival of the near bound, t2 > t1
    double period_s = 0.0;       ///< tau = t2 - t1
    double speed_mps = 0.0;      ///< space-mean speed used for the projection
    double snapshot_time_s = 0.0;
};

/// Space mean speed: the harmonic mean, which averages over distance rather
/// than time. Always <= the arithmetic mean. Throws std::invalid_argument on
/// an empty list or non-positive speeds; the empty-window fallback speed is
/// the caller's code path, not this one.
double space_mean_speed(std::span<const double> speeds_mps);

/// Projects a sensing snapshot at time t with window bounds {x1, x2} into
/// arrival times at the link origin: t1 = t - x1/v, t2 = t - x2/v, using the
/// space-mean speed of the visible pedestrians (or the fallback speed when
/// none are visible).
ObservationWindow window_from_snapshot(const SensingSnapshot& snapshot,
                                       const EstimatorConfig& config);

/// Per-link record of accepted projected intervals. A new window is accepted
/// only if its interior is disjoint from every previously accepted interval
/// on the same link; shared endpoints are allowed.
class IndependenceLedger {
public:
    /// Returns whether the window was accepted, inserting it if so.
    bool accept(const ObservationWindow& window);

    /// True when every pair of accepted intervals on every link has disjoint
    /// interiors (diagnostic; holds by construction).
    bool interiors_disjoint() const;

    /// Accepted intervals of one link, keyed by t1.
    const std::map<double, double>* intervals(LinkId link) const;

private:
    std::map<LinkId, std::map<double, double>> accepted_;
};

/// Poisson MLE with exact (chi-squared) confidence bounds, reported per
/// minute. `lambda = Nc/Tc` over the pooled windows.
struct RateEstimate {
    LinkId link = 0;
    double eval_time_s = 0.0;
    double lambda_per_min = 0.0;
    double lower_per_min = 0.0;
    double upper_per_min = 0.0;
    long long total_count = 0;   ///< Nc
    double total_period_s = 0.0; ///< Tc
};

/// Pools accepted windows into the Poisson MLE and its confidence bounds:
/// lambda = Nc/Tc, lower = chi2(alpha/2, 2 Nc)/(2 Tc), upper =
/// chi2(1-alpha/2, 2 Nc + 2)/(2 Tc). Internally in seconds, reported per
/// minute. An empty window list is "no data" (nullopt), never a zero rate.
std::optional<RateEstimate> estimate_rate(std::span<const ObservationWindow> windows,
                                          const EstimatorConfig& config);

struct ProfilePoint {
    LinkId link = 0;
    double eval_time_s = 0.0;
    std::optional<RateEstimate> estimate;  ///< nullopt renders as a gap
    bool window_clipped = false;  ///< moving window truncated at the run edge
};

/// Moving-average time profile: at each evaluation time, the estimate over
/// accepted windows whose snapshot time lies within +-window_s/2. Windows at
/// the run boundary are truncated to available data and flagged.
std::vector<ProfilePoint> rate_profile(std::span<const ObservationWindow> windows,
                                       const EstimatorConfig& config,
                                       LinkId link, double t_begin, double t_end,
                                       double eval_step_s);

/// Stationary-counter baseline: all arrivals at the link origin over the
/// duration, with the same MLE and bounds (Nc = count, Tc = duration).
RateEstimate stationary_counter(LinkId link, std::span<const double> arrival_times_s,
                                double duration_s, const EstimatorConfig& config);

/// Snapshot-to-window pipeline: converts snapshots (in time order) to
/// windows, applies the independence criterion per link, and groups the
/// accepted windows by link. Rejected windows are kept for diagnostics.
struct WindowExtraction {
    std::map<LinkId, std::vector<ObservationWindow>> accepted;
    std::vector<ObservationWindow> rejected;
    IndependenceLedger ledger;
};
WindowExtraction extract_windows(std::span<const SensingSnapshot> snapshots,
                                 const EstimatorConfig& config);

}  // namespace pedflow
