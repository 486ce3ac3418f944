#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "rakelink/model.hpp"

namespace rakelink {

/**
 * @brief Shape of a synthetic suburban network.
 *
 * A straight main line of evenly spaced stations, with `branch_count`
 * single-station branches hanging off interior junctions. Services run
 * between termini and turnback stations in both directions; departures are
 * a mixture of an all-day background and two rush-hour bumps.
 */
struct GeneratorConfig {
  std::size_t station_count = 16;  // main-line stations + branch termini
  double corridor_length_km = 60.0;
  std::size_t branch_count = 2;
  double branch_length_km = 12.0;
  std::size_t services_target = 887;

  // relative weights of the departure-time mixture
  double background_weight = 1.0;
  double morning_peak_weight = 0.35;
  double evening_peak_weight = 0.35;
  double morning_peak_hour = 8.75;
  double evening_peak_hour = 18.25;
  double peak_width_hours = 1.0;

  double average_speed_kmh = 42.0;
  std::uint64_t seed = 1;
};

/// Throws ValidationError(InfeasibleConfig). Output always passes model validation.
std::pair<Timetable, Topology> generate(const GeneratorConfig& cfg);

}  // namespace rakelink
