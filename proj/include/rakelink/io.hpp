#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rakelink/model.hpp"

namespace rakelink {

using json = nlohmann::ordered_json;

// --- scalars ---------------------------------------------------------------

/// Accepts integer seconds ("3600") or "HH:MM:SS" (hours may reach 24).
Seconds parse_time(std::string_view text);

/// Accepts a decimal number or the literal "inf".
double parse_bound(std::string_view text);

/// Shortest round-trip decimal form; infinity is written as "inf".
std::string format_number(double value);

// --- CSV -------------------------------------------------------------------

/// Header: service_id,origin,destination,dep_time,arr_time,run_distance_km
std::vector<Service> read_timetable_csv(std::istream& in);
void write_timetable_csv(std::ostream& out, const Timetable& tt);

/// Header: station_a,station_b,distance_km
std::vector<DistanceRecord> read_topology_csv(std::istream& in);
void write_topology_csv(std::ostream& out, const Topology& topo);

Timetable load_timetable(const std::filesystem::path& path);
Topology load_topology(const std::filesystem::path& path, const Timetable& tt);

// --- canonical JSON --------------------------------------------------------

json bound_to_json(double value);
double bound_from_json(const json& j, std::string_view field);

json to_json(const Bounds& b);
Bounds bounds_from_json(const json& j);

json to_json(const Timetable& tt);
std::vector<Service> services_from_json(const json& j);

json to_json(const Topology& topo);
std::vector<DistanceRecord> distances_from_json(const json& j);

// --- files -----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rakelink
