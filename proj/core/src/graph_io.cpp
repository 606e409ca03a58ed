// SPDX-License-Identifier: Apache-2.0
#include "pedflow/graph_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw DataError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(where + ": missing key '" + key + "'");
    return *it;
}

}  // namespace

NetworkGraph load_graph(std::istream& in, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(source_name + ": " + e.what());
    }
    if (!doc.is_object()) throw DataError(source_name + ": top level must be an object");
    reject_unknown_keys(doc, {"nodes", "links", "routes"}, source_name);

    std::vector<Node> nodes;
    for (std::size_t i = 0; i < require(doc, "nodes", source_name).size(); ++i) {
        const json& jn = doc["nodes"][i];
        const std::string where = source_name + ": nodes[" + std::to_string(i) + "]";
        reject_unknown_keys(jn, {"id", "x", "y", "origin", "destination"}, where);
        Node n;
        n.id = require(jn, "id", where).get<NodeId>();
        n.position.x = require(jn, "x", where).get<double>();
        n.position.y = require(jn, "y", where).get<double>();
        n.is_origin = jn.value("origin", false);
        n.is_destination = jn.value("destination", false);
        nodes.push_back(n);
    }

    std::vector<Link> links;
    for (std::size_t i = 0; i < require(doc, "links", source_name).size(); ++i) {
        const json& jl = doc["links"][i];
        const std::string where = source_name + ": links[" + std::to_string(i) + "]";
        reject_unknown_keys(jl, {"id", "from", "to"}, where);
        Link l;
        l.id = require(jl, "id", where).get<LinkId>();
        l.from = require(jl, "from", where).get<NodeId>();
        l.to = require(jl, "to", where).get<NodeId>();
        links.push_back(l);
    }

    std::vector<Route> routes;
    std::map<LinkId, std::size_t> link_by_id;
    for (std::size_t i = 0; i < links.size(); ++i) link_by_id[links[i].id] = i;
    for (std::size_t i = 0; i < require(doc, "routes", source_name).size(); ++i) {
        const json& jr = doc["routes"][i];
        const std::string where = source_name + ": routes[" + std::to_string(i) + "]";
        reject_unknown_keys(jr, {"id", "links", "rate_per_min"}, where);
        Route r;
        r.id = require(jr, "id", where).get<RouteId>();
        for (const json& jid : require(jr, "links", where)) {
            r.links.push_back(jid.get<LinkId>());
        }
        r.rate_per_min = require(jr, "rate_per_min", where).get<double>();
        if (!r.links.empty()) {
            auto first = link_by_id.find(r.links.front());
            auto last = link_by_id.find(r.links.back());
            if (first != link_by_id.end()) r.origin = links[first->second].from;
            if (last != link_by_id.end()) r.destination = links[last->second].to;
        }
        routes.push_back(std::move(r));
    }

    return NetworkGraph(std::move(nodes), std::move(links), std::move(routes));
}

NetworkGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file: " + path.string());
    return load_graph(in, path.filename().string());
}

NetworkGraph load_validated_graph(const std::filesystem::path& path) {
    NetworkGraph graph = load_graph(path);
    const auto report = validate_graph(graph);
    if (!report.empty()) {
        std::ostringstream os;
        os << path.string() << ": invalid graph:";
        for (const std::string& v : report) os << "\n  " << v;
        throw DataError(os.str());
    }
    return graph;
}

void save_graph(const NetworkGraph& graph, std::ostream& out) {
    json doc;
    doc["nodes"] = json::array();
    for (const Node& n : graph.nodes()) {
        json jn;
        jn["id"] = n.id;
        jn["x"] = n.position.x;
        jn["y"] = n.position.y;
        jn["origin"] = n.is_origin;
        jn["destination"] = n.is_destination;
        doc["nodes"].push_back(jn);
    }
    doc["links"] = json::array();
    for (const Link& l : graph.links()) {
        json jl;
        jl["id"] = l.id;
        jl["from"] = l.from;
        jl["to"] = l.to;
        doc["links"].push_back(jl);
    }
    doc["routes"] = json::array();
    for (const Route& r : graph.routes()) {
        json jr;
        jr["id"] = r.id;
        jr["links"] = r.links;
        jr["rate_per_min"] = r.rate_per_min;
        doc["routes"].push_back(jr);
    }
    out << doc.dump(2) << "\n";
}

void save_graph(const NetworkGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write graph file: " + path.string());
    save_graph(graph, out);
}

namespace {

struct PairSpec {
    int a;
    int b;
};

// Grid skeleton of the benchmark network. Columns/rows are irregularly
// spaced and every node carries a fixed jitter so link lengths spread over
// roughly 35..135 m.
constexpr double bench_col_x[9] = {0.0, 55.0, 140.0, 205.0, 310.0, 375.0, 455.0, 560.0, 625.0};
constexpr double bench_row_y[3] = {0.0, 70.0, 145.0};
constexpr double bench_jitter[27][2] = {
    {3.0, -6.0},  {-8.0, 4.0},  {5.0, 9.0},   {11.0, -3.0}, {-4.0, -9.0}, {7.0, 2.0},
    {-11.0, 6.0}, {2.0, -4.0},  {9.0, 7.0},   {-5.0, 3.0},  {6.0, -8.0},  {-9.0, -2.0},
    {4.0, 10.0},  {-2.0, -5.0}, {10.0, 4.0},  {-7.0, 8.0},  {1.0, -10.0}, {-3.0, 5.0},
    {8.0, -1.0},  {-10.0, -7.0}, {2.0, 6.0},  {-6.0, -4.0}, {12.0, 1.0},  {-1.0, 9.0},
    {5.0, -8.0},  {-8.0, -3.0}, {6.0, 5.0},
};

// 37 undirected pairs: 24 horizontal plus 13 vertical connectors.
const std::vector<PairSpec> bench_pairs() {
    std::vector<PairSpec> pairs;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 8; ++c) {
            pairs.push_back({r * 9 + c, r * 9 + c + 1});
        }
    }
    const int vertical_r0[] = {0, 2, 4, 5, 6, 8};      // row 0 <-> row 1
    const int vertical_r1[] = {0, 1, 3, 4, 5, 7, 8};   // row 1 <-> row 2
    for (int c : vertical_r0) pairs.push_back({c, 9 + c});
    for (int c : vertical_r1) pairs.push_back({9 + c, 18 + c});
    return pairs;
}

// 17 pairs that carry pedestrian routes in the benchmark scenario.
const std::vector<PairSpec> bench_active_pairs() {
    return {
        {9, 10},  {10, 11}, {11, 12}, {12, 13}, {13, 14}, {14, 15}, {15, 16}, {16, 17},
        {0, 1},   {3, 4},   {6, 7},
        {19, 20}, {22, 23}, {25, 26},
        {0, 9},   {13, 22}, {8, 17},
    };
}

}  // namespace

NetworkGraph make_benchmark_graph(double route_rate_per_min) {
    std::vector<Node> nodes;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 9; ++c) {
            const int id = r * 9 + c;
            Node n;
            n.id = id;
            n.position = {bench_col_x[c] + bench_jitter[id][0],
                          bench_row_y[r] + bench_jitter[id][1]};
            nodes.push_back(n);
        }
    }

    std::vector<Link> links;
    std::map<std::pair<NodeId, NodeId>, LinkId> by_endpoints;
    LinkId next_link = 0;
    for (const PairSpec& p : bench_pairs()) {
        links.push_back({next_link, p.a, p.b, 0.0});
        by_endpoints[{p.a, p.b}] = next_link++;
        links.push_back({next_link, p.b, p.a, 0.0});
        by_endpoints[{p.b, p.a}] = next_link++;
    }

    std::vector<Route> routes;
    RouteId next_route = 0;
    for (const PairSpec& p : bench_active_pairs()) {
        nodes[static_cast<std::size_t>(p.a)].is_origin = true;
        nodes[static_cast<std::size_t>(p.a)].is_destination = true;
        nodes[static_cast<std::size_t>(p.b)].is_origin = true;
        nodes[static_cast<std::size_t>(p.b)].is_destination = true;
        routes.push_back({next_route++, {by_endpoints.at({p.a, p.b})}, p.a, p.b, route_rate_per_min});
        routes.push_back({next_route++, {by_endpoints.at({p.b, p.a})}, p.b, p.a, route_rate_per_min});
    }

    return NetworkGraph(std::move(nodes), std::move(links), std::move(routes));
}

NetworkGraph make_triangle_graph(double route_rate_per_min, double side_m) {
    const double h = side_m * 0.8660254037844386;  // sqrt(3)/2
    std::vector<Node> nodes{
        {0, {0.0, 0.0}, true, false},
        {1, {side_m, 0.0}, false, true},
        {2, {side_m / 2.0, -h}, false, false},
    };
    std::vector<Link> links{
        {0, 0, 1, 0.0}, {1, 1, 0, 0.0},
        {2, 1, 2, 0.0}, {3, 2, 1, 0.0},
        {4, 0, 2, 0.0}, {5, 2, 0, 0.0},
    };
    std::vector<Route> routes{{0, {0}, 0, 1, route_rate_per_min}};
    return NetworkGraph(std::move(nodes), std::move(links), std::move(routes));
}

NetworkGraph make_two_node_graph(double route_rate_per_min, double length_m) {
    std::vector<Node> nodes{
        {0, {0.0, 0.0}, true, false},
        {1, {length_m, 0.0}, false, true},
    };
    std::vector<Link> links{{0, 0, 1, 0.0}, {1, 1, 0, 0.0}};
    std::vector<Route> routes{{0, {0}, 0, 1, route_rate_per_min}};
    return NetworkGraph(std::move(nodes), std::move(links), std::move(routes));
}

}  // namespace pedflow
