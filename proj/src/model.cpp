#include "rakelink/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rakelink {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateServiceId: return "DuplicateServiceId";
    case ErrorCode::TimeOrderViolation: return "TimeOrderViolation";
    case ErrorCode::OutOfRangeTime: return "OutOfRangeTime";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::MissingStation: return "MissingStation";
    case ErrorCode::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::InadmissibleBounds: return "InadmissibleBounds";
    case ErrorCode::InconsistentMatching: return "InconsistentMatching";
    case ErrorCode::InvalidCover: return "InvalidCover";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
  }
  return "Unknown";
}

ValidationError::ValidationError(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)) {}

// ---------------------------------------------------------------------------
// Timetable

Timetable::Timetable(std::vector<Service> services) : services_(std::move(services)) {
  for (std::size_t i = 0; i < services_.size(); ++i) by_id_.emplace(services_[i].service_id, i);
}

Timetable Timetable::validate(std::vector<Service> raw) {
  if (raw.empty()) throw ValidationError(ErrorCode::InvalidField, "services", "timetable is empty");

  std::set<std::string, std::less<>> seen;
  for (const Service& s : raw) {
    const std::string& id = s.service_id;
    if (id.empty()) throw ValidationError(ErrorCode::InvalidField, "service_id", "empty service_id");
    if (!seen.insert(id).second)
      throw ValidationError(ErrorCode::DuplicateServiceId, id, "service_id '" + id + "' appears more than once");
    if (s.origin.empty() || s.destination.empty())
      throw ValidationError(ErrorCode::InvalidField, id, "service '" + id + "' has an empty station");
    if (s.dep_time < 0 || s.dep_time >= kDayLength)
      throw ValidationError(ErrorCode::OutOfRangeTime, id,
                            "service '" + id + "' dep_time " + std::to_string(s.dep_time) + " outside [0, 86400)");
    if (s.arr_time <= 0 || s.arr_time > kDayLength)
      throw ValidationError(ErrorCode::OutOfRangeTime, id,
                            "service '" + id + "' arr_time " + std::to_string(s.arr_time) + " outside (0, 86400]");
    if (s.dep_time >= s.arr_time)
      throw ValidationError(ErrorCode::TimeOrderViolation, id,
                            "service '" + id + "' departs at " + std::to_string(s.dep_time) +
                                " but arrives at " + std::to_string(s.arr_time));
    if (!std::isfinite(s.run_distance_km) || s.run_distance_km < 0.0)
      throw ValidationError(ErrorCode::InvalidField, id, "service '" + id + "' has an invalid run distance");
  }

  std::sort(raw.begin(), raw.end(), [](const Service& a, const Service& b) {
    return std::tie(a.dep_time, a.service_id) < std::tie(b.dep_time, b.service_id);
  });
  return Timetable(std::move(raw));
}

std::optional<std::size_t> Timetable::index_of(std::string_view service_id) const {
  auto it = by_id_.find(service_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<StationId> Timetable::stations() const {
  std::set<StationId> all;
  for (const Service& s : services_) {
    all.insert(s.origin);
    all.insert(s.destination);
  }
  return {all.begin(), all.end()};
}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(std::vector<StationId> stations, std::vector<double> matrix)
    : stations_(std::move(stations)), matrix_(std::move(matrix)) {}

Topology Topology::validate(std::span<const DistanceRecord> raw, const Timetable& timetable) {
  std::set<StationId> names;
  for (const DistanceRecord& r : raw) {
    const std::string pair = r.station_a.str() + "-" + r.station_b.str();
    if (r.station_a.empty() || r.station_b.empty())
      throw ValidationError(ErrorCode::InvalidField, pair, "empty station name in topology");
    if (std::isnan(r.distance_km))
      throw ValidationError(ErrorCode::InvalidField, pair, "distance for " + pair + " is not a number");
    if (r.distance_km < 0.0)
      throw ValidationError(ErrorCode::NegativeDistance, pair, "distance for " + pair + " is negative");
    names.insert(r.station_a);
    names.insert(r.station_b);
  }
  for (const StationId& s : timetable.stations()) {
    if (!names.contains(s))
      throw ValidationError(ErrorCode::MissingStation, s.str(),
                            "station '" + s.str() + "' is used by the timetable but absent from the topology");
  }

  std::vector<StationId> stations(names.begin(), names.end());
  const std::size_t n = stations.size();
  auto index = [&](const StationId& s) {
    return static_cast<std::size_t>(std::lower_bound(stations.begin(), stations.end(), s) - stations.begin());
  };

  std::vector<double> matrix(n * n, kInf);
  for (std::size_t a = 0; a < n; ++a) matrix[a * n + a] = 0.0;

  for (const DistanceRecord& r : raw) {
    const std::size_t a = index(r.station_a);
    const std::size_t b = index(r.station_b);
    if (a == b) continue;  // diagonal forced to 0
    double& cell = matrix[a * n + b];
    if (cell != kInf && cell != r.distance_km) {
      const std::string pair = r.station_a.str() + "-" + r.station_b.str();
      throw ValidationError(ErrorCode::AsymmetricDistance, pair,
                            "conflicting distances given for " + pair);
    }
    cell = r.distance_km;
    matrix[b * n + a] = r.distance_km;
  }
  return Topology(std::move(stations), std::move(matrix));
}

std::optional<std::size_t> Topology::index_of(const StationId& station) const {
  auto it = std::lower_bound(stations_.begin(), stations_.end(), station);
  if (it == stations_.end() || *it != station) return std::nullopt;
  return static_cast<std::size_t>(it - stations_.begin());
}

double Topology::distance(const StationId& a, const StationId& b) const {
  if (a == b) return 0.0;
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib) return kInf;
  return distance(*ia, *ib);
}

std::vector<DistanceRecord> Topology::entries() const {
  std::vector<DistanceRecord> out;
  const std::size_t n = stations_.size();
  for (std::size_t a = 0; a < n; ++a) {
    bool any = false;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = matrix_[a * n + b];
      if (d == kInf) continue;
      out.push_back({stations_[a], stations_[b], d});
      any = true;
    }
    // isolated stations still need a row so they survive a round trip
    bool connected = any;
    for (std::size_t b = 0; b < a && !connected; ++b) connected = matrix_[b * n + a] != kInf;
    if (!connected) out.push_back({stations_[a], stations_[a], 0.0});
  }
  return out;
}

// ---------------------------------------------------------------------------

void Bounds::check_domain() const {
  auto bad = [](double v) { return std::isnan(v) || v < 0.0; };
  if (bad(w_min)) throw ValidationError(ErrorCode::InvalidField, "w_min", "w_min must be >= 0 or inf");
  if (bad(w_max)) throw ValidationError(ErrorCode::InvalidField, "w_max", "w_max must be >= 0 or inf");
  if (bad(d_max)) throw ValidationError(ErrorCode::InvalidField, "d_max", "d_max must be >= 0 or inf");
  if (std::isnan(v_avg_max) || v_avg_max <= 0.0)
    throw ValidationError(ErrorCode::InvalidField, "v_avg_max", "v_avg_max must be > 0 or inf");
}

}  // namespace rakelink
