// SPDX-License-Identifier: Apache-2.0
#include "pedflow/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pedflow {

const std::vector<LinkId> NetworkGraph::empty_links_{};

NetworkGraph::NetworkGraph(std::vector<Node> nodes, std::vector<Link> links,
                           std::vector<Route> routes)
    : nodes_(std::move(nodes)), links_(std::move(links)), routes_(std::move(routes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        node_index_.emplace(nodes_[i].id, i);
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
        Link& l = links_[i];
        link_index_.emplace(l.id, i);
        const Node* a = find_node(l.from);
        const Node* b = find_node(l.to);
        l.length_m = (a && b) ? distance(a->position, b->position) : 0.0;
        out_links_[l.from].push_back(l.id);
    }
    for (auto& [node, ids] : out_links_) {
        std::sort(ids.begin(), ids.end());
    }
    for (std::size_t i = 0; i < routes_.size(); ++i) {
        route_index_.emplace(routes_[i].id, i);
    }
}

const Node* NetworkGraph::find_node(NodeId id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const Link* NetworkGraph::find_link(LinkId id) const {
    auto it = link_index_.find(id);
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

const Route* NetworkGraph::find_route(RouteId id) const {
    auto it = route_index_.find(id);
    return it == route_index_.end() ? nullptr : &routes_[it->second];
}

const Node& NetworkGraph::node_at(NodeId id) const {
    const Node* n = find_node(id);
    if (!n) throw std::out_of_range("unknown node id " + std::to_string(id));
    return *n;
}

const Link& NetworkGraph::link_at(LinkId id) const {
    const Link* l = find_link(id);
    if (!l) throw std::out_of_range("unknown link id " + std::to_string(id));
    return *l;
}

const Route& NetworkGraph::route_at(RouteId id) const {
    const Route* r = find_route(id);
    if (!r) throw std::out_of_range("unknown route id " + std::to_string(id));
    return *r;
}

std::span<const LinkId> NetworkGraph::out_links(NodeId id) const {
    auto it = out_links_.find(id);
    if (it == out_links_.end()) return empty_links_;
    return it->second;
}

std::optional<LinkId> NetworkGraph::reverse_link(LinkId id) const {
    const Link* l = find_link(id);
    if (!l) return std::nullopt;
    for (LinkId out : out_links(l->to)) {
        const Link& cand = link_at(out);
        if (cand.to == l->from) return cand.id;
    }
    return std::nullopt;
}

double NetworkGraph::route_length_m(const Route& route) const {
    double total = 0.0;
    for (LinkId id : route.links) {
        const Link* l = find_link(id);
        if (l) total += l->length_m;
    }
    return total;
}

namespace {

std::string describe_link(const Link& l) {
    std::ostringstream os;
    os << "link " << l.id << " (" << l.from << " -> " << l.to << ")";
    return os.str();
}

}  // namespace

std::vector<std::string> validate_graph(const NetworkGraph& graph) {
    std::vector<std::string> report;
    auto add = [&report](const std::string& msg) { report.push_back(msg); };

    std::set<NodeId> node_ids;
    for (const Node& n : graph.nodes()) {
        if (!node_ids.insert(n.id).second) {
            add("duplicate node id " + std::to_string(n.id));
        }
        if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y)) {
            add("node " + std::to_string(n.id) + " has non-finite position");
        }
    }

    std::set<LinkId> link_ids;
    std::set<std::pair<NodeId, NodeId>> directed_pairs;
    for (const Link& l : graph.links()) {
        if (!link_ids.insert(l.id).second) {
            add("duplicate link id " + std::to_string(l.id));
        }
        if (l.from == l.to) {
            add(describe_link(l) + " is a self-loop");
            continue;
        }
        bool endpoints_ok = true;
        if (!graph.find_node(l.from)) {
            add(describe_link(l) + " references missing node " + std::to_string(l.from));
            endpoints_ok = false;
        }
        if (!graph.find_node(l.to)) {
            add(describe_link(l) + " references missing node " + std::to_string(l.to));
            endpoints_ok = false;
        }
        if (endpoints_ok && !(l.length_m > 0.0)) {
            add(describe_link(l) + " has non-positive length");
        }
        directed_pairs.emplace(l.from, l.to);
    }
    for (const Link& l : graph.links()) {
        if (l.from == l.to) continue;
        if (!directed_pairs.contains({l.to, l.from})) {
            add("missing reverse link for " + describe_link(l));
        }
    }

    std::set<RouteId> route_ids;
    for (const Route& r : graph.routes()) {
        if (!route_ids.insert(r.id).second) {
            add("duplicate route id " + std::to_string(r.id));
        }
        const std::string tag = "route " + std::to_string(r.id);
        if (!(r.rate_per_min >= 0.0) || !std::isfinite(r.rate_per_min)) {
            add(tag + " has invalid rate");
        }
        if (r.links.empty()) {
            add(tag + " has no links");
            continue;
        }
        bool links_ok = true;
        for (LinkId id : r.links) {
            if (!graph.find_link(id)) {
                add(tag + " references missing link " + std::to_string(id));
                links_ok = false;
            }
        }
        if (!links_ok) continue;

        const Node* origin = graph.find_node(r.origin);
        const Node* destination = graph.find_node(r.destination);
        if (!origin) {
            add(tag + " origin node " + std::to_string(r.origin) + " does not exist");
        } else if (!origin->is_origin) {
            add(tag + " origin node " + std::to_string(r.origin) + " is not flagged as an origin");
        }
        if (!destination) {
            add(tag + " destination node " + std::to_string(r.destination) + " does not exist");
        } else if (!destination->is_destination) {
            add(tag + " destination node " + std::to_string(r.destination) +
                " is not flagged as a destination");
        }

        bool connected = graph.link_at(r.links.front()).from == r.origin;
        std::set<NodeId> visited{graph.link_at(r.links.front()).from};
        for (std::size_t i = 0; i < r.links.size(); ++i) {
            const Link& l = graph.link_at(r.links[i]);
            if (i + 1 < r.links.size() && l.to != graph.link_at(r.links[i + 1]).from) {
                connected = false;
            }
            if (!visited.insert(l.to).second) {
                add(tag + " revisits node " + std::to_string(l.to));
            }
        }
        if (graph.link_at(r.links.back()).to != r.destination) connected = false;
        if (!connected) {
            add(tag + " links do not form a directed path from origin to destination");
            continue;
        }

        const auto shortest = shortest_route(graph, r.origin, r.destination);
        if (shortest) {
            double best = 0.0;
            for (LinkId id : *shortest) best += graph.link_at(id).length_m;
            const double own = graph.route_length_m(r);
            if (own > best + 1e-9) {
                add(tag + " is not a minimum-length path for its origin-destination pair");
            }
        }
    }

    return report;
}

std::map<LinkId, double> link_rates(const NetworkGraph& graph) {
    std::map<LinkId, double> rates;
    for (const Link& l : graph.links()) rates[l.id] = 0.0;
    for (const Route& r : graph.routes()) {
        for (LinkId id : r.links) rates[id] += r.rate_per_min;
    }
    return rates;
}

std::optional<std::vector<LinkId>> shortest_route(const NetworkGraph& graph,
                                                  NodeId origin,
                                                  NodeId destination) {
    if (origin == destination) return std::vector<LinkId>{};
    if (!graph.find_node(origin) || !graph.find_node(destination)) return std::nullopt;

    struct Entry {
        double dist;
        std::vector<LinkId> path;
        NodeId node;
        bool operator>(const Entry& other) const {
            if (dist != other.dist) return dist > other.dist;
            return path > other.path;
        }
    };

    // Dijkstra over (distance, link-id sequence): the queue ordering makes the
    // lexicographic tie-break deterministic.
    constexpr double tie_eps = 1e-9;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::map<NodeId, Entry> best;
    queue.push({0.0, {}, origin});
    best[origin] = {0.0, {}, origin};

    while (!queue.empty()) {
        Entry cur = queue.top();
        queue.pop();
        auto settled = best.find(cur.node);
        if (settled != best.end() &&
            (cur.dist > settled->second.dist + tie_eps ||
             (cur.dist > settled->second.dist - tie_eps && cur.path > settled->second.path))) {
            continue;  // stale entry
        }
        if (cur.node == destination) return cur.path;
        for (LinkId out : graph.out_links(cur.node)) {
            const Link& l = graph.link_at(out);
            if (!(l.length_m > 0.0)) continue;
            Entry next{cur.dist + l.length_m, cur.path, l.to};
            next.path.push_back(l.id);
            auto it = best.find(l.to);
            if (it == best.end() || next.dist < it->second.dist - tie_eps ||
                (next.dist < it->second.dist + tie_eps && next.path < it->second.path)) {
                best[l.to] = next;
                queue.push(std::move(next));
            }
        }
    }
    return std::nullopt;
}

}  // namespace pedflow
