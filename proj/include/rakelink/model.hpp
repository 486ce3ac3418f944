#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rakelink {

/// Seconds since midnight. Sub-second precision is rejected at parse time.
using Seconds = std::int64_t;

inline constexpr Seconds kDayLength = 86400;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  ParseError,
  DuplicateServiceId,
  TimeOrderViolation,
  OutOfRangeTime,
  InvalidField,
  MissingStation,
  AsymmetricDistance,
  NegativeDistance,
  InadmissibleBounds,
  InconsistentMatching,
  InvalidCover,
  TooLarge,
  InfeasibleConfig,
  InvalidGrid,
};

std::string_view to_string(ErrorCode code);

/**
 * @brief Input rejected by one of the validators.
 *
 * `subject()` names the offending record (service id, station pair, field)
 * so callers can surface field-level messages.
 */
class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorCode code, std::string subject, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

class StationId {
 public:
  StationId() = default;
  explicit StationId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const StationId&) const = default;
  bool operator==(const StationId&) const = default;

 private:
  std::string value_;
};

struct Service {
  std::string service_id;
  StationId origin;
  StationId destination;
  Seconds dep_time = 0;
  Seconds arr_time = 0;
  double run_distance_km = 0.0;

  Seconds duration() const noexcept { return arr_time - dep_time; }

  bool operator==(const Service&) const = default;
};

/// Validated, immutable timetable ordered by (dep_time, service_id).
class Timetable {
 public:
  /// Validates every record and normalizes the ordering. Throws ValidationError.
  static Timetable validate(std::vector<Service> raw_services);

  std::span<const Service> services() const noexcept { return services_; }
  const Service& operator[](std::size_t i) const { return services_[i]; }
  std::size_t size() const noexcept { return services_.size(); }
  Seconds day_length() const noexcept { return kDayLength; }

  std::optional<std::size_t> index_of(std::string_view service_id) const;

  /// Every origin and destination, sorted and deduplicated.
  std::vector<StationId> stations() const;

  bool operator==(const Timetable& other) const { return services_ == other.services_; }

 private:
  explicit Timetable(std::vector<Service> services);

  std::vector<Service> services_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

struct DistanceRecord {
  StationId station_a;
  StationId station_b;
  double distance_km = 0.0;
};

/**
 * @brief Symmetric station-to-station deadhead distances.
 *
 * Stored as a dense matrix over the station set; pairs without an entry are
 * +inf (deadhead impossible). The diagonal is always 0.
 */
class Topology {
 public:
  /// Applies the symmetric closure and checks coverage of `timetable`'s stations.
  static Topology validate(std::span<const DistanceRecord> raw, const Timetable& timetable);

  std::span<const StationId> stations() const noexcept { return stations_; }
  std::optional<std::size_t> index_of(const StationId& station) const;

  double distance(std::size_t a, std::size_t b) const { return matrix_[a * stations_.size() + b]; }
  double distance(const StationId& a, const StationId& b) const;

  /// Finite off-diagonal entries with station_a < station_b, in canonical order.
  std::vector<DistanceRecord> entries() const;

  bool operator==(const Topology& other) const {
    return stations_ == other.stations_ && matrix_ == other.matrix_;
  }

 private:
  Topology(std::vector<StationId> stations, std::vector<double> matrix);

  std::vector<StationId> stations_;
  std::vector<double> matrix_;
};

/// Decision bounds for one feasibility graph. Any field may be +inf.
struct Bounds {
  double w_min = 0.0;       // seconds
  double w_max = kInf;      // seconds
  double d_max = kInf;      // km
  double v_avg_max = kInf;  // km/h

  /// A tuple is admissible iff w_max > w_min (so w_min = inf is never admissible).
  bool admissible() const noexcept { return w_max > w_min; }

  /// Throws ValidationError on negative, NaN or non-positive speed fields.
  void check_domain() const;

  bool operator==(const Bounds&) const = default;
};

}  // namespace rakelink

template <>
struct std::hash<rakelink::StationId> {
  std::size_t operator()(const rakelink::StationId& s) const noexcept {
    return std::hash<std::string>{}(s.str());
  }
};
