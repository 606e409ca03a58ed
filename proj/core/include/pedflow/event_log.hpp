// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "pedflow/simkit.hpp"

namespace pedflow {

/// Writes a run's event log as a directory of newline-delimited CSV files:
///   arrivals.csv   time,ped_id,route_id,speed
///   snapshots.csv  time,link_id,x1,x2,ped_id,ped_pos,ped_speed
///   visits.csv     time,link_id
///   meta.json      {"duration_s": ...}
/// Snapshots are one row per visible pedestrian; a snapshot with no visible
/// pedestrians is a single row with the pedestrian fields left empty.
/// Output is byte-identical for identical logs.
void write_event_log(const EventLog& log, const std::filesystem::path& dir);

/// Reads a log directory written by write_event_log (or produced by any other
/// observer, as long as it follows the schemas). Malformed rows are reported
/// with file and line number; a wrong header aborts with a schema error.
/// Missing meta.json falls back to the latest event time as the duration.
EventLog read_event_log(const std::filesystem::path& dir);

}  // namespace pedflow
