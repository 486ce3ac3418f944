#include "rakelink/demo_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace rakelink {
namespace {

/// Portable sampling on top of mt19937_64, whose output sequence is fixed by the standard.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * n)); }
  double normal(double mean, double sd) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Station {
  std::string name;
  double position_km;      // along the main line (junction position for branches)
  double spur_km = 0.0;    // extra distance off the main line
};

double track_distance(const Station& a, const Station& b) {
  if (a.name == b.name) return 0.0;
  return std::abs(a.position_km - b.position_km) + a.spur_km + b.spur_km;
}

struct Route {
  std::size_t from;
  std::size_t to;
  double weight;
};

std::string padded(const char* prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
  return buf;
}

}  // namespace

std::pair<Timetable, Topology> generate(const GeneratorConfig& cfg) {
  auto infeasible = [](const char* field, const std::string& message) {
    return ValidationError(ErrorCode::InfeasibleConfig, field, message);
  };
  if (cfg.station_count < 2) throw infeasible("station_count", "need at least two stations");
  if (cfg.branch_count + 2 > cfg.station_count)
    throw infeasible("branch_count", "branches need at least two main-line stations");
  if (cfg.services_target == 0) throw infeasible("services_target", "services_target must be positive");
  if (!(cfg.corridor_length_km > 0.0)) throw infeasible("corridor_length_km", "corridor must have positive length");
  if (!(cfg.average_speed_kmh > 0.0)) throw infeasible("average_speed_kmh", "speed must be positive");
  if (cfg.branch_length_km < 0.0) throw infeasible("branch_length_km", "branch length must be >= 0");
  const double total_weight = cfg.background_weight + cfg.morning_peak_weight + cfg.evening_peak_weight;
  if (!(total_weight > 0.0) || cfg.background_weight < 0.0 || cfg.morning_peak_weight < 0.0 ||
      cfg.evening_peak_weight < 0.0)
    throw infeasible("weights", "departure mixture weights must be >= 0 and not all zero");

  const std::size_t main_count = cfg.station_count - cfg.branch_count;
  std::vector<Station> stations;
  for (std::size_t k = 0; k < main_count; ++k) {
    const double pos = cfg.corridor_length_km * static_cast<double>(k) / static_cast<double>(main_count - 1);
    stations.push_back({padded("M", k, 2), pos});
  }
  for (std::size_t b = 0; b < cfg.branch_count; ++b) {
    // junctions spread over the interior of the main line
    const std::size_t junction = 1 + (b + 1) * (main_count - 2) / (cfg.branch_count + 1);
    stations.push_back({padded("B", b + 1, 1), stations[std::min(junction, main_count - 1)].position_km,
                        cfg.branch_length_km});
  }

  const std::size_t west = 0;
  const std::size_t east = main_count - 1;
  std::vector<Route> routes;
  routes.push_back({west, east, 4.0});
  if (main_count >= 4) {
    routes.push_back({west, main_count / 3, 1.5});
    routes.push_back({west, 2 * main_count / 3, 1.5});
    routes.push_back({main_count / 3, east, 1.0});
  }
  for (std::size_t b = 0; b < cfg.branch_count; ++b) {
    routes.push_back({main_count + b, west, 1.5});
    routes.push_back({main_count + b, east, 0.75});
  }
  double route_weight = 0.0;
  for (const Route& r : routes) route_weight += r.weight;

  Sampler rng(cfg.seed);
  auto sample_hour = [&]() {
    const double pick = rng.uniform() * total_weight;
    if (pick < cfg.background_weight) return rng.uniform(5.0, 23.0);
    if (pick < cfg.background_weight + cfg.morning_peak_weight)
      return rng.normal(cfg.morning_peak_hour, cfg.peak_width_hours);
    return rng.normal(cfg.evening_peak_hour, cfg.peak_width_hours);
  };

  struct Draft {
    Seconds dep;
    Seconds arr;
    std::size_t from;
    std::size_t to;
    double km;
  };
  std::vector<Draft> drafts;
  drafts.reserve(cfg.services_target);
  while (drafts.size() < cfg.services_target) {
    double pick = rng.uniform() * route_weight;
    std::size_t r = 0;
    while (r + 1 < routes.size() && pick >= routes[r].weight) pick -= routes[r++].weight;
    auto [from, to, weight] = routes[r];
    if (rng.uniform() < 0.5) std::swap(from, to);

    const double km = track_distance(stations[from], stations[to]);
    const auto run_s = static_cast<Seconds>(std::lround(km / cfg.average_speed_kmh * 3600.0));
    const Seconds dep = 60 * static_cast<Seconds>(std::floor(sample_hour() * 60.0));
    const Seconds arr = dep + std::max<Seconds>(60, run_s);
    if (dep < 0 || arr > kDayLength) continue;  // resample outside the service day
    drafts.push_back({dep, arr, from, to, std::round(km * 1000.0) / 1000.0});
  }
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) { return a.dep < b.dep; });

  std::vector<Service> services;
  services.reserve(drafts.size());
  for (std::size_t k = 0; k < drafts.size(); ++k) {
    const Draft& d = drafts[k];
    services.push_back({padded("S", k + 1, 4), StationId(stations[d.from].name), StationId(stations[d.to].name), d.dep,
                        d.arr, d.km});
  }
  Timetable tt = Timetable::validate(std::move(services));

  std::vector<DistanceRecord> records;
  for (std::size_t a = 0; a < stations.size(); ++a)
    for (std::size_t b = a + 1; b < stations.size(); ++b)
      records.push_back({StationId(stations[a].name), StationId(stations[b].name),
                         std::round(track_distance(stations[a], stations[b]) * 1000.0) / 1000.0});
  Topology topo = Topology::validate(records, tt);
  return {std::move(tt), std::move(topo)};
}

}  // namespace rakelink
