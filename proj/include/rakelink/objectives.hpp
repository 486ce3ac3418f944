#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rakelink/pathcover.hpp"

namespace rakelink {

/// The five operational objectives of one solved configuration; all minimized.
struct ObjectiveVector {
  std::int64_t f1 = 0;  // fleet size
  std::int64_t f2 = 0;  // max headway over consecutive services of any link, seconds
  double f3 = 0.0;      // max deadhead distance over consecutive services, km
  double f4 = 0.0;      // population std dev of link lengths
  double f5 = 0.0;      // population std dev of course lengths (revenue km per rake)

  std::array<double, 5> as_array() const {
    return {static_cast<double>(f1), static_cast<double>(f2), f3, f4, f5};
  }
  static ObjectiveVector from_array(const std::array<double, 5>& a);

  bool operator==(const ObjectiveVector&) const = default;
};

/// Throws ValidationError(InvalidCover) if `sol` does not partition `tt` into chronological chains.
ObjectiveVector evaluate(const CoverSolution& sol, const Timetable& tt, const Topology& topo);

/// Population standard deviation; values are summed in ascending order so the result is order independent.
double population_stddev(std::vector<double> values);

json to_json(const ObjectiveVector& o);
ObjectiveVector objectives_from_json(const json& j);

/// counts[t] = number of services with dep <= t < arr, for t in [0, 86400).
struct DensityProfile {
  std::vector<std::int32_t> counts;
};

DensityProfile density_profile(const Timetable& tt);
std::int32_t peak_density(const DensityProfile& dp);

/// `second,count`; with run_length only the seconds where the count changes are written.
void write_density_csv(std::ostream& out, const DensityProfile& dp, bool run_length = false);

}  // namespace rakelink
