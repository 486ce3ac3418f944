#include "rakelink/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace rakelink {

ObjectiveVector ObjectiveVector::from_array(const std::array<double, 5>& a) {
  return {static_cast<std::int64_t>(a[0]), static_cast<std::int64_t>(a[1]), a[2], a[3], a[4]};
}

double population_stddev(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

ObjectiveVector evaluate(const CoverSolution& sol, const Timetable& tt, const Topology& topo) {
  const std::size_t n = tt.size();
  std::vector<char> seen(n, 0);
  ObjectiveVector out;
  std::vector<double> lengths;
  std::vector<double> courses;
  lengths.reserve(sol.links.size());
  courses.reserve(sol.links.size());

  for (const RakeLink& link : sol.links) {
    if (link.services.empty()) throw ValidationError(ErrorCode::InvalidCover, "links", "empty rake-link");
    double course = 0.0;
    for (std::size_t k = 0; k < link.services.size(); ++k) {
      const std::size_t s = link.services[k];
      if (s >= n) throw ValidationError(ErrorCode::InvalidCover, std::to_string(s), "service index out of range");
      if (seen[s])
        throw ValidationError(ErrorCode::InvalidCover, tt[s].service_id,
                              "service '" + tt[s].service_id + "' is covered twice");
      seen[s] = 1;
      course += tt[s].run_distance_km;
      if (k == 0) continue;
      const Service& prev = tt[link.services[k - 1]];
      const Service& cur = tt[s];
      const Seconds h = cur.dep_time - prev.arr_time;
      const double d = topo.distance(prev.destination, cur.origin);
      if (h < 0 || !std::isfinite(d))
        throw ValidationError(ErrorCode::InvalidCover, cur.service_id,
                              "'" + prev.service_id + "' cannot be followed by '" + cur.service_id + "'");
      out.f2 = std::max(out.f2, h);
      out.f3 = std::max(out.f3, d);
    }
    lengths.push_back(static_cast<double>(link.services.size()));
    courses.push_back(course);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ValidationError(ErrorCode::InvalidCover, "links", "not every service is covered");

  out.f1 = static_cast<std::int64_t>(sol.links.size());
  out.f4 = population_stddev(std::move(lengths));
  out.f5 = population_stddev(std::move(courses));
  return out;
}

json to_json(const ObjectiveVector& o) {
  return json{{"f1", o.f1}, {"f2", o.f2}, {"f3", o.f3}, {"f4", o.f4}, {"f5", o.f5}};
}

ObjectiveVector objectives_from_json(const json& j) {
  return {j.at("f1").get<std::int64_t>(), j.at("f2").get<std::int64_t>(), j.at("f3").get<double>(),
          j.at("f4").get<double>(), j.at("f5").get<double>()};
}

// ---------------------------------------------------------------------------

DensityProfile density_profile(const Timetable& tt) {
  std::vector<std::int32_t> delta(kDayLength + 1, 0);
  for (const Service& s : tt.services()) {
    ++delta[s.dep_time];
    --delta[s.arr_time];
  }
  DensityProfile dp;
  dp.counts.resize(kDayLength);
  std::int32_t running = 0;
  for (Seconds t = 0; t < kDayLength; ++t) {
    running += delta[t];
    dp.counts[t] = running;
  }
  return dp;
}

std::int32_t peak_density(const DensityProfile& dp) {
  if (dp.counts.empty()) return 0;
  return *std::max_element(dp.counts.begin(), dp.counts.end());
}

void write_density_csv(std::ostream& out, const DensityProfile& dp, bool run_length) {
  out << "second,count\n";
  for (std::size_t t = 0; t < dp.counts.size(); ++t) {
    if (run_length && t > 0 && dp.counts[t] == dp.counts[t - 1]) continue;
    out << t << ',' << dp.counts[t] << '\n';
  }
}

}  // namespace rakelink
