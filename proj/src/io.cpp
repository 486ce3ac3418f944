#include "rakelink/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rakelink {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

ValidationError parse_error(std::size_t line_no, const std::string& what) {
  return ValidationError(ErrorCode::ParseError, "line " + std::to_string(line_no),
                         "line " + std::to_string(line_no) + ": " + what);
}

/// Reads rows of a CSV with a fixed header, calling `row` with the split fields.
template <typename RowFn>
void read_csv(std::istream& in, std::string_view expected_header, std::size_t columns, RowFn&& row) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty()) continue;
    if (!header_seen) {
      std::string normalized;
      for (std::string_view f : split(view)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized != expected_header)
        throw parse_error(line_no, "expected header '" + std::string(expected_header) + "'");
      header_seen = true;
      continue;
    }
    auto fields = split(view);
    if (fields.size() != columns)
      throw parse_error(line_no, "expected " + std::to_string(columns) + " fields, got " +
                                     std::to_string(fields.size()));
    row(line_no, fields);
  }
  if (!header_seen) throw parse_error(line_no, "missing header '" + std::string(expected_header) + "'");
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Seconds parse_time(std::string_view text) {
  text = trim(text);
  if (text.find(':') == std::string_view::npos) {
    if (auto v = to_int(text)) return *v;
    throw ValidationError(ErrorCode::ParseError, std::string(text),
                          "time '" + std::string(text) + "' is not integer seconds or HH:MM:SS");
  }
  const auto parts = [&] {
    std::vector<std::string_view> p;
    std::size_t start = 0;
    for (;;) {
      const std::size_t c = text.find(':', start);
      p.push_back(text.substr(start, c - start));
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
    return p;
  }();
  if (parts.size() == 3) {
    auto h = to_int(parts[0]);
    auto m = to_int(parts[1]);
    auto s = to_int(parts[2]);
    if (h && m && s && *h >= 0 && *m >= 0 && *m < 60 && *s >= 0 && *s < 60 && parts[1].size() == 2 &&
        parts[2].size() == 2)
      return *h * 3600 + *m * 60 + *s;
  }
  throw ValidationError(ErrorCode::ParseError, std::string(text),
                        "time '" + std::string(text) + "' is not integer seconds or HH:MM:SS");
}

double parse_bound(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "Inf" || text == "INF" || text == "\xE2\x88\x9E") return kInf;
  if (auto v = to_double(text); v && std::isfinite(*v)) return *v;
  throw ValidationError(ErrorCode::ParseError, std::string(text),
                        "bound '" + std::string(text) + "' is not a number or 'inf'");
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

std::vector<Service> read_timetable_csv(std::istream& in) {
  std::vector<Service> out;
  read_csv(in, "service_id,origin,destination,dep_time,arr_time,run_distance_km", 6,
           [&](std::size_t line_no, const std::vector<std::string_view>& f) {
             Service s;
             s.service_id = std::string(f[0]);
             s.origin = StationId(std::string(f[1]));
             s.destination = StationId(std::string(f[2]));
             try {
               s.dep_time = parse_time(f[3]);
               s.arr_time = parse_time(f[4]);
             } catch (const ValidationError& e) {
               throw parse_error(line_no, e.what());
             }
             auto d = to_double(f[5]);
             if (!d) throw parse_error(line_no, "run_distance_km '" + std::string(f[5]) + "' is not a number");
             s.run_distance_km = *d;
             out.push_back(std::move(s));
           });
  return out;
}

void write_timetable_csv(std::ostream& out, const Timetable& tt) {
  out << "service_id,origin,destination,dep_time,arr_time,run_distance_km\n";
  for (const Service& s : tt.services()) {
    out << s.service_id << ',' << s.origin.str() << ',' << s.destination.str() << ',' << s.dep_time << ','
        << s.arr_time << ',' << format_number(s.run_distance_km) << '\n';
  }
}

std::vector<DistanceRecord> read_topology_csv(std::istream& in) {
  std::vector<DistanceRecord> out;
  read_csv(in, "station_a,station_b,distance_km", 3,
           [&](std::size_t line_no, const std::vector<std::string_view>& f) {
             auto d = to_double(f[2]);
             if (!d) throw parse_error(line_no, "distance_km '" + std::string(f[2]) + "' is not a number");
             out.push_back({StationId(std::string(f[0])), StationId(std::string(f[1])), *d});
           });
  return out;
}

void write_topology_csv(std::ostream& out, const Topology& topo) {
  out << "station_a,station_b,distance_km\n";
  for (const DistanceRecord& r : topo.entries())
    out << r.station_a.str() << ',' << r.station_b.str() << ',' << format_number(r.distance_km) << '\n';
}

Timetable load_timetable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open timetable '" + path.string() + "'");
  return Timetable::validate(read_timetable_csv(in));
}

Topology load_topology(const std::filesystem::path& path, const Timetable& tt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology '" + path.string() + "'");
  auto records = read_topology_csv(in);
  return Topology::validate(records, tt);
}

// ---------------------------------------------------------------------------

json bound_to_json(double value) {
  if (std::isinf(value)) return "inf";
  // integral values are written without a fraction
  if (value == std::trunc(value) && std::abs(value) < 9.0e15) return static_cast<std::int64_t>(value);
  return value;
}

double bound_from_json(const json& j, std::string_view field) {
  if (j.is_string()) return parse_bound(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ValidationError(ErrorCode::InvalidField, std::string(field),
                        std::string(field) + " must be a number or \"inf\"");
}

json to_json(const Bounds& b) {
  return json{{"w_min", bound_to_json(b.w_min)},
              {"w_max", bound_to_json(b.w_max)},
              {"d_max", bound_to_json(b.d_max)},
              {"v_avg_max", bound_to_json(b.v_avg_max)}};
}

Bounds bounds_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError(ErrorCode::InvalidField, "bounds", "bounds must be an object");
  Bounds b;
  for (const char* key : {"w_min", "w_max", "d_max", "v_avg_max"}) {
    if (!j.contains(key)) throw ValidationError(ErrorCode::InvalidField, key, std::string("missing bound ") + key);
  }
  b.w_min = bound_from_json(j.at("w_min"), "w_min");
  b.w_max = bound_from_json(j.at("w_max"), "w_max");
  b.d_max = bound_from_json(j.at("d_max"), "d_max");
  b.v_avg_max = bound_from_json(j.at("v_avg_max"), "v_avg_max");
  b.check_domain();
  return b;
}

json to_json(const Timetable& tt) {
  json services = json::array();
  for (const Service& s : tt.services()) {
    services.push_back({{"service_id", s.service_id},
                        {"origin", s.origin.str()},
                        {"destination", s.destination.str()},
                        {"dep_time", s.dep_time},
                        {"arr_time", s.arr_time},
                        {"run_distance_km", s.run_distance_km}});
  }
  return json{{"day_length", kDayLength}, {"services", std::move(services)}};
}

std::vector<Service> services_from_json(const json& j) {
  std::vector<Service> out;
  try {
    for (const json& s : j.at("services")) {
      Service svc;
      svc.service_id = s.at("service_id").get<std::string>();
      svc.origin = StationId(s.at("origin").get<std::string>());
      svc.destination = StationId(s.at("destination").get<std::string>());
      svc.dep_time = s.at("dep_time").get<Seconds>();
      svc.arr_time = s.at("arr_time").get<Seconds>();
      svc.run_distance_km = s.at("run_distance_km").get<double>();
      out.push_back(std::move(svc));
    }
  } catch (const json::exception& e) {
    throw ValidationError(ErrorCode::ParseError, "services", e.what());
  }
  return out;
}

json to_json(const Topology& topo) {
  json stations = json::array();
  for (const StationId& s : topo.stations()) stations.push_back(s.str());
  json distances = json::array();
  for (const DistanceRecord& r : topo.entries()) {
    distances.push_back(
        {{"station_a", r.station_a.str()}, {"station_b", r.station_b.str()}, {"distance_km", r.distance_km}});
  }
  return json{{"stations", std::move(stations)}, {"distances", std::move(distances)}};
}

std::vector<DistanceRecord> distances_from_json(const json& j) {
  std::vector<DistanceRecord> out;
  try {
    for (const json& r : j.at("distances")) {
      out.push_back({StationId(r.at("station_a").get<std::string>()), StationId(r.at("station_b").get<std::string>()),
                     r.at("distance_km").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(ErrorCode::ParseError, "distances", e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rakelink
