// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedflow/geometry.hpp"

namespace pedflow {

using NodeId = int;
using LinkId = int;
using RouteId = int;

/// A place where pedestrians arrive, leave, or change direction.
struct Node {
    NodeId id = 0;
    Vec2 position;
    bool is_origin = false;       ///< pedestrians may enter the network here
    bool is_destination = false;  ///< pedestrians may exit the network here
};

/// Directed edge. Pedestrians on a link walk from `from` to `to`; positions
/// along the link are measured in meters from the `from` node.
struct Link {
    LinkId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    double length_m = 0.0;  ///< Euclidean distance between endpoint nodes
};

/// Minimum-length directed path from an origin to a destination, carrying
/// the Poisson arrival rate of pedestrians entering on it.
struct Route {
    RouteId id = 0;
    std::vector<LinkId> links;
    NodeId origin = 0;
    NodeId destination = 0;
    double rate_per_min = 0.0;
};

/// Directed pedestrian traffic network. Immutable after construction and
/// safe to share across concurrent readers.
class NetworkGraph {
public:
    NetworkGraph() = default;
    NetworkGraph(std::vector<Node> nodes, std::vector<Link> links,
                 std::vector<Route> routes);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Route>& routes() const { return routes_; }

    const Node* find_node(NodeId id) const;
    const Link* find_link(LinkId id) const;
    const Route* find_route(RouteId id) const;

    /// Throwing accessors for ids that are known to exist.
    const Node& node_at(NodeId id) const;
    const Link& link_at(LinkId id) const;
    const Route& route_at(RouteId id) const;

    /// Outgoing links of a node, sorted by link id.
    std::span<const LinkId> out_links(NodeId id) const;

    /// Id of the opposite-direction link sharing this link's endpoints.
    std::optional<LinkId> reverse_link(LinkId id) const;

    double route_length_m(const Route& route) const;

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<Route> routes_;
    std::unordered_map<NodeId, std::size_t> node_index_;
    std::unordered_map<LinkId, std::size_t> link_index_;
    std::unordered_map<RouteId, std::size_t> route_index_;
    std::map<NodeId, std::vector<LinkId>> out_links_;
    static const std::vector<LinkId> empty_links_;
};

/// Checks every structural invariant of the graph and returns one message
/// per violation; an empty report means the graph is valid. Violations are
/// data, not failures: this never throws on bad topology.
std::vector<std::string> validate_graph(const NetworkGraph& graph);

/// Link arrival rates by Poisson superposition: each link's rate is the sum
/// of the rates of all routes that use it. Links on no route map to 0.
std::map<LinkId, double> link_rates(const NetworkGraph& graph);

/// Minimum-total-length directed path from origin to destination, as an
/// ordered list of link ids. Length ties are broken by the lexicographically
/// smallest link id sequence. Returns an empty path when origin equals
/// destination and std::nullopt when the destination is unreachable.
std::optional<std::vector<LinkId>> shortest_route(const NetworkGraph& graph,
                                                  NodeId origin,
                                                  NodeId destination);

}  // namespace pedflow
