// SPDX-License-Identifier: Apache-2.0
#include "pedflow/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pedflow/errors.hpp"

namespace pedflow {

double SpeedDistribution::sample(Rng& rng) const {
    if (std_mps <= 0.0) return std::max(mean_mps, floor_mps);
    std::normal_distribution<double> normal(mean_mps, std_mps);
    for (int i = 0; i < 10000; ++i) {
        const double v = normal(rng);
        if (v >= floor_mps) return v;
    }
    throw ConfigError("speed distribution: truncation floor rejects effectively all samples");
}

void validate_config(const ScenarioConfig& config) {
    auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
    if (!(config.duration_s > 0.0)) fail("duration_s must be > 0");
    if (!(config.snapshot_hz > 0.0)) fail("snapshot_hz must be > 0");
    if (!(config.sensing.range_m > 0.0)) fail("sensing range_m must be > 0");
    if (!(config.sensing.fov_deg > 0.0) || config.sensing.fov_deg > 360.0)
        fail("sensing fov_deg must be in (0, 360]");
    if (!(config.pedestrian_speed.mean_mps > 0.0)) fail("pedestrian speed mean must be > 0");
    if (config.pedestrian_speed.std_mps < 0.0) fail("pedestrian speed std must be >= 0");
    if (!(config.pedestrian_speed.floor_mps > 0.0)) fail("pedestrian speed floor must be > 0");
    if (config.pedestrian_speed.std_mps > 0.0 &&
        config.pedestrian_speed.floor_mps >
            config.pedestrian_speed.mean_mps + 8.0 * config.pedestrian_speed.std_mps)
        fail("pedestrian speed floor rejects effectively all samples");
    if (config.vehicle_speed_mps < 0.0) fail("vehicle_speed_mps must be >= 0");
    if (config.vehicle_start_offset_m < 0.0) fail("vehicle_start_offset_m must be >= 0");
    if (config.speed_noise_std_mps < 0.0) fail("speed_noise_std_mps must be >= 0");
}

std::vector<Pedestrian> generate_arrivals(const Route& route, double duration_s,
                                          Rng& rng, const SpeedDistribution& speeds) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("generate_arrivals: duration must be > 0");
    if (route.rate_per_min < 0.0) throw std::invalid_argument("generate_arrivals: negative rate");

    std::vector<Pedestrian> peds;
    if (route.rate_per_min == 0.0) return peds;

    const double rate_per_s = route.rate_per_min / 60.0;
    std::exponential_distribution<double> gap(rate_per_s);
    double t = 0.0;
    int seq = 0;
    for (;;) {
        t += gap(rng);
        if (t > duration_s) break;
        Pedestrian p;
        p.id = seq++;
        p.route = route.id;
        p.entry_time_s = t;
        p.speed_mps = speeds.sample(rng);
        p.route_leg = 0;
        p.link = route.links.empty() ? 0 : route.links.front();
        p.link_pos_m = 0.0;
        peds.push_back(p);
    }
    return peds;
}

LinkId next_link_policy(const NetworkGraph& graph, NodeId at_node,
                        std::optional<LinkId> arrived_on,
                        const std::map<LinkId, int>& visit_counts) {
    const auto outgoing = graph.out_links(at_node);
    if (outgoing.empty()) {
        throw DataError("next_link_policy: node " + std::to_string(at_node) +
                        " has no outgoing links");
    }
    std::optional<LinkId> reverse;
    if (arrived_on) reverse = graph.reverse_link(*arrived_on);

    auto count_of = [&visit_counts](LinkId id) {
        auto it = visit_counts.find(id);
        return it == visit_counts.end() ? 0 : it->second;
    };

    std::optional<LinkId> best;
    for (LinkId cand : outgoing) {
        if (reverse && cand == *reverse && outgoing.size() > 1) continue;
        if (!best || count_of(cand) < count_of(*best)) best = cand;
        // outgoing is sorted by id, so the first minimum wins ties
    }
    return *best;
}

std::vector<std::pair<double, double>> sector_segment_intersection(
    Vec2 center, double heading_rad, double range_m, double fov_deg,
    Vec2 a, Vec2 b) {
    std::vector<std::pair<double, double>> result;
    const double len = distance(a, b);
    if (!(len > 0.0) || !(range_m > 0.0)) return result;
    const Vec2 dir = (1.0 / len) * (b - a);
    const Vec2 w0 = a - center;

    // Clip to the range disk: |w0 + x dir|^2 <= r^2.
    const double B = dot(dir, w0);
    const double C = dot(w0, w0) - range_m * range_m;
    const double disc = B * B - C;
    if (disc < 0.0) return result;
    const double sq = std::sqrt(disc);
    double lo = std::max(-B - sq, 0.0);
    double hi = std::min(-B + sq, len);
    if (lo > hi) return result;

    // Clips [lo, hi] by cross(bound, w0 + x dir) >= 0 (sign=+1) or <= 0 (-1).
    auto clip_half_plane = [&](double& lo_io, double& hi_io, Vec2 bound, double sign) {
        const double k0 = sign * cross(bound, w0);
        const double k1 = sign * cross(bound, dir);
        if (std::abs(k1) < 1e-15) {
            if (k0 < 0.0) lo_io = hi_io + 1.0;  // empty
            return;
        }
        const double x0 = -k0 / k1;
        if (k1 > 0.0) {
            lo_io = std::max(lo_io, x0);
        } else {
            hi_io = std::min(hi_io, x0);
        }
    };

    if (fov_deg >= 360.0) {
        result.emplace_back(lo, hi);
        return result;
    }

    const double half = deg_to_rad(fov_deg) / 2.0;
    if (fov_deg <= 180.0) {
        clip_half_plane(lo, hi, unit_from_angle(heading_rad - half), +1.0);
        clip_half_plane(lo, hi, unit_from_angle(heading_rad + half), -1.0);
        if (lo <= hi) result.emplace_back(lo, hi);
        return result;
    }

    // Reflex sector: subtract the open back wedge from the disk interval.
    const double back = heading_rad + std::numbers::pi;
    const double back_half = std::numbers::pi - half;
    double blo = lo, bhi = hi;
    clip_half_plane(blo, bhi, unit_from_angle(back - back_half), +1.0);
    clip_half_plane(blo, bhi, unit_from_angle(back + back_half), -1.0);
    if (blo > bhi) {
        result.emplace_back(lo, hi);
    } else {
        if (lo < blo) result.emplace_back(lo, blo);
        if (bhi < hi) result.emplace_back(bhi, hi);
    }
    return result;
}

Simulation::Simulation(const NetworkGraph& graph, ScenarioConfig config)
    : graph_(graph), config_(std::move(config)),
      noise_rng_(derive_seed(config_.seed, seed_stream::sensor_noise)) {
    validate_config(config_);

    // Arrivals for every route are drawn up front from per-route streams, so
    // the realization is independent of traversal order and step sizes.
    std::vector<RouteId> route_ids;
    for (const Route& r : graph_.routes()) route_ids.push_back(r.id);
    std::sort(route_ids.begin(), route_ids.end());
    for (RouteId rid : route_ids) {
        const Route& route = graph_.route_at(rid);
        if (route.links.empty()) continue;
        Rng rng(derive_seed(config_.seed, seed_stream::arrivals,
                            static_cast<std::uint64_t>(rid)));
        auto peds = generate_arrivals(route, config_.duration_s, rng, config_.pedestrian_speed);
        pending_.insert(pending_.end(), peds.begin(), peds.end());
    }
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Pedestrian& x, const Pedestrian& y) {
                         if (x.entry_time_s != y.entry_time_s) return x.entry_time_s < y.entry_time_s;
                         return x.route < y.route;
                     });
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        pending_[i].id = static_cast<int>(i);
        arrival_events_.push_back({pending_[i].entry_time_s, pending_[i].id,
                                   pending_[i].route, pending_[i].speed_mps});
    }

    vehicle_.speed_mps = config_.vehicle_speed_mps;
    const LinkId first = next_link_policy(graph_, config_.vehicle_start_node,
                                          std::nullopt, vehicle_.visit_counts);
    vehicle_.visit_counts[first] = 1;
    visit_events_.push_back({0.0, first});
    const Link& l = graph_.link_at(first);
    if (config_.vehicle_start_offset_m > l.length_m) {
        throw ConfigError("scenario: vehicle_start_offset_m exceeds first link length");
    }
    place_vehicle_on(first, config_.vehicle_start_offset_m);
}

void Simulation::place_vehicle_on(LinkId link, double offset_m) {
    const Link& l = graph_.link_at(link);
    const Vec2 a = graph_.node_at(l.from).position;
    const Vec2 b = graph_.node_at(l.to).position;
    const Vec2 dir = (1.0 / l.length_m) * (b - a);
    vehicle_.current_link = link;
    vehicle_.link_pos_m = offset_m;
    vehicle_.position = a + offset_m * dir;
    vehicle_.heading_rad = std::atan2(dir.y, dir.x);
}

void advance_pedestrian(Pedestrian& ped, const Route& route, const NetworkGraph& graph,
                        double dt) {
    double remaining = ped.speed_mps * dt;
    while (remaining > 0.0) {
        const Link& l = graph.link_at(route.links[static_cast<std::size_t>(ped.route_leg)]);
        const double to_end = l.length_m - ped.link_pos_m;
        if (remaining < to_end) {
            ped.link_pos_m += remaining;
            return;
        }
        remaining -= to_end;
        if (ped.route_leg + 1 < static_cast<int>(route.links.size())) {
            ++ped.route_leg;
            ped.link = route.links[static_cast<std::size_t>(ped.route_leg)];
            ped.link_pos_m = 0.0;
        } else {
            ped.route_leg = -1;  // reached destination, exits the network
            return;
        }
    }
}

void Simulation::advance_vehicle(double dt) {
    if (vehicle_.speed_mps <= 0.0) return;
    double remaining = vehicle_.speed_mps * dt;
    double elapsed = 0.0;
    for (;;) {
        const Link& l = graph_.link_at(vehicle_.current_link);
        const double to_end = l.length_m - vehicle_.link_pos_m;
        if (remaining < to_end) {
            place_vehicle_on(vehicle_.current_link, vehicle_.link_pos_m + remaining);
            return;
        }
        remaining -= to_end;
        elapsed += to_end / vehicle_.speed_mps;
        const LinkId next = next_link_policy(graph_, l.to, vehicle_.current_link,
                                             vehicle_.visit_counts);
        ++vehicle_.visit_counts[next];
        visit_events_.push_back({time_s_ + elapsed, next});
        place_vehicle_on(next, 0.0);
    }
}

void Simulation::step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Simulation::step: dt must be > 0");
    const double t_end = time_s_ + dt;

    for (Pedestrian& ped : active_) {
        advance_pedestrian(ped, graph_.route_at(ped.route), graph_, dt);
    }
    // Pedestrians whose entry time falls inside [t, t + dt) start walking at
    // their exact entry instant.
    while (next_pending_ < pending_.size() &&
           pending_[next_pending_].entry_time_s < t_end) {
        Pedestrian ped = pending_[next_pending_++];
        if (ped.entry_time_s >= time_s_) {
            const double walk = t_end - ped.entry_time_s;
            if (walk > 0.0) advance_pedestrian(ped, graph_.route_at(ped.route), graph_, walk);
        }
        if (ped.route_leg >= 0) active_.push_back(ped);
    }
    std::erase_if(active_, [](const Pedestrian& p) { return p.route_leg < 0; });

    advance_vehicle(dt);
    time_s_ = t_end;
}

std::vector<SensingSnapshot> sense(const NetworkGraph& graph, const VehicleState& vehicle,
                                   std::span<const Pedestrian> pedestrians,
                                   const SensingRegion& region, double time_s) {
    std::vector<SensingSnapshot> snapshots;
    for (const Link& l : graph.links()) {
        if (!(l.length_m > 0.0)) continue;
        const Vec2 a = graph.node_at(l.from).position;
        const Vec2 b = graph.node_at(l.to).position;
        const auto intervals = sector_segment_intersection(
            vehicle.position, vehicle.heading_rad, region.range_m, region.fov_deg, a, b);
        for (const auto& [xlo, xhi] : intervals) {
            if (!(xhi - xlo > 1e-9)) continue;
            SensingSnapshot snap;
            snap.time_s = time_s;
            snap.link = l.id;
            snap.x2_m = xlo;
            snap.x1_m = xhi;
            for (const Pedestrian& ped : pedestrians) {
                if (ped.link != l.id || ped.route_leg < 0) continue;
                if (ped.link_pos_m < xlo || ped.link_pos_m > xhi) continue;
                snap.pedestrians.push_back({ped.id, ped.link_pos_m, ped.speed_mps});
            }
            std::sort(snap.pedestrians.begin(), snap.pedestrians.end(),
                      [](const SnapshotPed& x, const SnapshotPed& y) {
                          return x.ped_id < y.ped_id;
                      });
            snapshots.push_back(std::move(snap));
        }
    }
    return snapshots;
}

std::vector<SensingSnapshot> Simulation::sense() {
    auto snapshots = pedflow::sense(graph_, vehicle_, active_, config_.sensing, time_s_);
    if (config_.speed_noise_std_mps > 0.0) {
        std::normal_distribution<double> noise(0.0, config_.speed_noise_std_mps);
        for (SensingSnapshot& snap : snapshots) {
            for (SnapshotPed& ped : snap.pedestrians) {
                ped.speed_mps = std::max(0.05, ped.speed_mps + noise(noise_rng_));
            }
        }
    }
    return snapshots;
}

EventLog Simulation::run() {
    EventLog log;
    log.duration_s = config_.duration_s;
    log.arrivals = arrival_events_;

    auto advance_to = [this](double target) {
        while (target - time_s_ > 1e-9) {
            step(std::min(simulation_step_s, target - time_s_));
        }
        time_s_ = target;
    };

    const long samples = static_cast<long>(std::floor(config_.duration_s * config_.snapshot_hz));
    for (long k = 0; k <= samples; ++k) {
        advance_to(static_cast<double>(k) / config_.snapshot_hz);
        auto snaps = sense();
        log.snapshots.insert(log.snapshots.end(), snaps.begin(), snaps.end());
    }
    advance_to(config_.duration_s);
    log.visits = visit_events_;
    return log;
}

}  // namespace pedflow
