// SPDX-License-Identifier: Apache-2.0
#include "pedflow/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pedflow/csv.hpp"

namespace pedflow {

namespace {

constexpr const char* arrivals_header = "time,ped_id,route_id,speed";
constexpr const char* snapshots_header = "time,link_id,x1,x2,ped_id,ped_pos,ped_speed";
constexpr const char* visits_header = "time,link_id";

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

void expect_header(std::ifstream& in, const std::filesystem::path& path, const char* header) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw DataError(path.filename().string() + ":1: schema mismatch, expected header '" +
                        header + "'");
    }
}

std::string loc(const std::filesystem::path& path, std::size_t line_no) {
    return path.filename().string() + ":" + std::to_string(line_no);
}

}  // namespace

void write_event_log(const EventLog& log, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    auto arrivals = open_out(dir / "arrivals.csv");
    arrivals << arrivals_header << "\n";
    for (const ArrivalEvent& a : log.arrivals) {
        arrivals << format_double(a.time_s) << ',' << a.ped_id << ',' << a.route << ','
                 << format_double(a.speed_mps) << "\n";
    }

    auto snapshots = open_out(dir / "snapshots.csv");
    snapshots << snapshots_header << "\n";
    for (const SensingSnapshot& s : log.snapshots) {
        const std::string prefix = format_double(s.time_s) + "," + std::to_string(s.link) +
                                   "," + format_double(s.x1_m) + "," + format_double(s.x2_m) + ",";
        if (s.pedestrians.empty()) {
            snapshots << prefix << ",,\n";
        } else {
            for (const SnapshotPed& p : s.pedestrians) {
                snapshots << prefix << p.ped_id << ',' << format_double(p.position_m) << ','
                          << format_double(p.speed_mps) << "\n";
            }
        }
    }

    auto visits = open_out(dir / "visits.csv");
    visits << visits_header << "\n";
    for (const VisitEvent& v : log.visits) {
        visits << format_double(v.time_s) << ',' << v.link << "\n";
    }

    auto meta = open_out(dir / "meta.json");
    nlohmann::json j;
    j["duration_s"] = log.duration_s;
    meta << j.dump(2) << "\n";
}

EventLog read_event_log(const std::filesystem::path& dir) {
    EventLog log;
    std::string line;

    {
        const auto path = dir / "arrivals.csv";
        auto in = open_in(path);
        expect_header(in, path, arrivals_header);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            if (fields.size() != 4) {
                throw DataError(loc(path, line_no) + ": expected 4 fields, got " +
                                std::to_string(fields.size()));
            }
            ArrivalEvent a;
            a.time_s = parse_csv_double(fields[0], loc(path, line_no));
            a.ped_id = static_cast<int>(parse_csv_int(fields[1], loc(path, line_no)));
            a.route = static_cast<RouteId>(parse_csv_int(fields[2], loc(path, line_no)));
            a.speed_mps = parse_csv_double(fields[3], loc(path, line_no));
            log.arrivals.push_back(a);
        }
    }

    {
        const auto path = dir / "snapshots.csv";
        auto in = open_in(path);
        expect_header(in, path, snapshots_header);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            if (fields.size() != 7) {
                throw DataError(loc(path, line_no) + ": expected 7 fields, got " +
                                std::to_string(fields.size()));
            }
            const std::string where = loc(path, line_no);
            const double time_s = parse_csv_double(fields[0], where);
            const LinkId link = static_cast<LinkId>(parse_csv_int(fields[1], where));
            const double x1 = parse_csv_double(fields[2], where);
            const double x2 = parse_csv_double(fields[3], where);

            // Consecutive rows sharing (time, link, x1, x2) belong to one snapshot.
            const bool same_group = !log.snapshots.empty() &&
                                    log.snapshots.back().time_s == time_s &&
                                    log.snapshots.back().link == link &&
                                    log.snapshots.back().x1_m == x1 &&
                                    log.snapshots.back().x2_m == x2;
            if (!same_group) {
                SensingSnapshot snap;
                snap.time_s = time_s;
                snap.link = link;
                snap.x1_m = x1;
                snap.x2_m = x2;
                log.snapshots.push_back(std::move(snap));
            }
            const bool empty_ped = fields[4].empty() && fields[5].empty() && fields[6].empty();
            if (!empty_ped) {
                SnapshotPed p;
                p.ped_id = static_cast<int>(parse_csv_int(fields[4], where));
                p.position_m = parse_csv_double(fields[5], where);
                p.speed_mps = parse_csv_double(fields[6], where);
                log.snapshots.back().pedestrians.push_back(p);
            }
        }
    }

    {
        const auto path = dir / "visits.csv";
        auto in = open_in(path);
        expect_header(in, path, visits_header);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            if (fields.size() != 2) {
                throw DataError(loc(path, line_no) + ": expected 2 fields, got " +
                                std::to_string(fields.size()));
            }
            VisitEvent v;
            v.time_s = parse_csv_double(fields[0], loc(path, line_no));
            v.link = static_cast<LinkId>(parse_csv_int(fields[1], loc(path, line_no)));
            log.visits.push_back(v);
        }
    }

    const auto meta_path = dir / "meta.json";
    if (std::filesystem::exists(meta_path)) {
        auto in = open_in(meta_path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
            log.duration_s = j.at("duration_s").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(meta_path.string() + ": " + e.what());
        }
    } else {
        double latest = 0.0;
        for (const auto& a : log.arrivals) latest = std::max(latest, a.time_s);
        for (const auto& s : log.snapshots) latest = std::max(latest, s.time_s);
        for (const auto& v : log.visits) latest = std::max(latest, v.time_s);
        log.duration_s = latest;
    }

    return log;
}

}  // namespace pedflow
