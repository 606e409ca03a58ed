// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedflow/geometry.hpp"
#include "pedflow/network.hpp"
#include "pedflow/rng.hpp"

namespace pedflow {

/// Normal speed distribution truncated below at a positive floor by
/// resampling, so the unphysical negative tail of the fit carries no mass.
struct SpeedDistribution {
    double mean_mps = 1.5;
    double std_mps = 0.4;
    double floor_mps = 0.3;

    double sample(Rng& rng) const;
};

/// Sensing sector carried by the vehicle, centered on its heading.
struct SensingRegion {
    double range_m = 20.0;
    double fov_deg = 160.0;
};

struct ScenarioConfig {
    std::string graph_file;  ///< empty when the graph is supplied in code
    SpeedDistribution pedestrian_speed;
    double vehicle_speed_mps = 3.5;  ///< 0 parks the vehicle
    SensingRegion sensing;
    double duration_s = 3600.0;
    double snapshot_hz = 1.0;
    std::uint64_t seed = 1;
    NodeId vehicle_start_node = 0;
    double vehicle_start_offset_m = 0.0;  ///< along the first traversed link
    double speed_noise_std_mps = 0.0;     ///< observation noise on reported speeds
};

/// Throws ConfigError when any parameter is out of range.
void validate_config(const ScenarioConfig& config);

/// An arriving agent. While walking, its position on the current link obeys
/// x = v * (t - t_entered_link); transitions between route links are handled
/// exactly at node boundaries.
struct Pedestrian {
    int id = 0;
    RouteId route = 0;
    double entry_time_s = 0.0;
    double speed_mps = 0.0;
    int route_leg = 0;        ///< index into the route's link list
    LinkId link = 0;          ///< link currently walked
    double link_pos_m = 0.0;  ///< meters from the link's `from` node
};

struct VehicleState {
    Vec2 position;
    double heading_rad = 0.0;
    double speed_mps = 0.0;
    LinkId current_link = 0;
    double link_pos_m = 0.0;
    std::map<LinkId, int> visit_counts;
};

struct SnapshotPed {
    int ped_id = 0;
    double position_m = 0.0;
    double speed_mps = 0.0;
};

/// One sensed interval of one directed link at one instant: the window
/// [x2, x1] (meters from the link origin, x1 = x2 + d_obs) and every
/// pedestrian of that link inside it. Boundary inclusion is closed.
struct SensingSnapshot {
    double time_s = 0.0;
    LinkId link = 0;
    double x1_m = 0.0;  ///< far window bound
    double x2_m = 0.0;  ///< near window bound, x2 < x1
    std::vector<SnapshotPed> pedestrians;
};

struct ArrivalEvent {
    double time_s = 0.0;
    int ped_id = 0;
    RouteId route = 0;
    double speed_mps = 0.0;
};

struct VisitEvent {
    double time_s = 0.0;
    LinkId link = 0;
};

/// Ground-truth state and raw sensing output of one simulation run.
struct EventLog {
    double duration_s = 0.0;
    std::vector<ArrivalEvent> arrivals;
    std::vector<SensingSnapshot> snapshots;
    std::vector<VisitEvent> visits;
};

/// Samples Poisson arrivals on a route over [0, duration]: i.i.d.
/// exponential inter-arrival times with mean 60/rate_per_min seconds, each
/// pedestrian with an independently sampled speed. Ids are sequential from
/// zero within the returned list.
std::vector<Pedestrian> generate_arrivals(const Route& route, double duration_s,
                                          Rng& rng, const SpeedDistribution& speeds);

/// Advances a pedestrian by dt seconds along its route at constant speed,
/// crossing link boundaries exactly and marking route_leg = -1 once the
/// destination is reached.
void advance_pedestrian(Pedestrian& ped, const Route& route, const NetworkGraph& graph,
                        double dt);

/// Least-visited traversal policy: among the outgoing links of `at_node`,
/// returns the one with the fewest recorded visits, ties broken by lowest
/// link id. Reversing straight back along `arrived_on`'s opposite link is
/// permitted only when it is the sole option. Throws DataError on a
/// dead-end node (impossible on a valid graph).
LinkId next_link_policy(const NetworkGraph& graph, NodeId at_node,
                        std::optional<LinkId> arrived_on,
                        const std::map<LinkId, int>& visit_counts);

/// Intersection of the closed sensing sector (center, heading, range, fov)
/// with segment a->b, as closed intervals in meters from `a`. The result has
/// at most two intervals; more than one can occur only for fov > 180.
std::vector<std::pair<double, double>> sector_segment_intersection(
    Vec2 center, double heading_rad, double range_m, double fov_deg,
    Vec2 a, Vec2 b);

/// Snapshots of every directed link interval inside the vehicle's sensing
/// sector, ordered by link id, with every pedestrian of that link whose
/// position lies in the closed window [x2, x1]. Speeds are reported exactly.
std::vector<SensingSnapshot> sense(const NetworkGraph& graph, const VehicleState& vehicle,
                                   std::span<const Pedestrian> pedestrians,
                                   const SensingRegion& region, double time_s);

/// Discrete-time world simulation: pedestrians arriving per route and
/// walking their routes, plus one sensing vehicle traversing the graph under
/// the least-visited policy. A given config (including seed) reproduces the
/// run exactly. A single simulation is strictly sequential; independent runs
/// may execute concurrently.
class Simulation {
public:
    Simulation(const NetworkGraph& graph, ScenarioConfig config);

    /// Advances the world by dt > 0 seconds (throws std::invalid_argument
    /// otherwise). Pedestrian and vehicle link transitions within the step
    /// happen at their exact times.
    void step(double dt);

    /// Snapshots of every link interval currently inside the sensing sector,
    /// ordered by link id. Reported pedestrian speeds are exact unless the
    /// config enables observation noise.
    std::vector<SensingSnapshot> sense();

    /// Runs the full scenario: steps the world, samples snapshots at the
    /// configured rate (first sample at t = 0), and returns the event log.
    EventLog run();

    double time() const { return time_s_; }
    const VehicleState& vehicle() const { return vehicle_; }
    std::span<const Pedestrian> active_pedestrians() const { return active_; }
    const std::vector<ArrivalEvent>& arrival_events() const { return arrival_events_; }
    const NetworkGraph& graph() const { return graph_; }
    const ScenarioConfig& config() const { return config_; }

private:
    void advance_vehicle(double dt);
    void place_vehicle_on(LinkId link, double offset_m);

    const NetworkGraph& graph_;
    ScenarioConfig config_;
    double time_s_ = 0.0;
    std::vector<Pedestrian> pending_;  ///< future arrivals, sorted by entry time
    std::size_t next_pending_ = 0;
    std::vector<Pedestrian> active_;
    std::vector<ArrivalEvent> arrival_events_;
    std::vector<VisitEvent> visit_events_;
    VehicleState vehicle_;
    Rng noise_rng_;
};

/// Time step used by Simulation::run between snapshot samples. Motion is
/// piecewise linear, so results do not depend on this value; it only bounds
/// the work done per loop iteration.
inline constexpr double simulation_step_s = 0.1;

}  // namespace pedflow
