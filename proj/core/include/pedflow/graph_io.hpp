// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pedflow/network.hpp"

namespace pedflow {

/// Parses a graph document. The format is JSON with top-level keys `nodes`
/// (id, x, y, origin, destination), `links` (id, from, to) and `routes`
/// (id, links, rate_per_min). Link lengths are derived from node positions;
/// route origins/destinations from their first/last link. Unknown keys are
/// rejected. Throws DataError on malformed input.
NetworkGraph load_graph(std::istream& in, const std::string& source_name = "<stream>");
NetworkGraph load_graph(const std::filesystem::path& path);

/// Loads and validates; throws DataError listing every violation when the
/// graph is structurally invalid.
NetworkGraph load_validated_graph(const std::filesystem::path& path);

void save_graph(const NetworkGraph& graph, std::ostream& out);
void save_graph(const NetworkGraph& graph, const std::filesystem::path& path);

/// Campus-scale benchmark network: 27 nodes, 74 directed links with lengths
/// between 30 and 150 m, and 34 single-link routes (17 link pairs) carrying
/// `route_rate_per_min` each. Ships with the repo as benchmark_27x74.json.
NetworkGraph make_benchmark_graph(double route_rate_per_min = 1.62);

/// Equilateral triangle with 100 m sides. Link 0 (node 0 -> node 1) carries
/// the only route; under the least-visited traversal policy the vehicle
/// cycles the triangle and spends one third of its time on link 0.
NetworkGraph make_triangle_graph(double route_rate_per_min,
                                 double side_m = 100.0);

/// Two nodes joined by one link pair, with a single route on link 0.
NetworkGraph make_two_node_graph(double route_rate_per_min,
                                 double length_m = 500.0);

}  // namespace pedflow
