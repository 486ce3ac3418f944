#include <doctest.h>

#include <numeric>

#include "rakelink/demo_data.hpp"
#include "rakelink/objectives.hpp"
#include "rakelink/pathcover.hpp"

using namespace rakelink;

namespace {

/// Mean density per hour of the day.
std::vector<double> hourly_means(const DensityProfile& dp) {
  std::vector<double> out(24, 0.0);
  for (std::size_t t = 0; t < dp.counts.size(); ++t) out[t / 3600] += dp.counts[t];
  for (double& h : out) h /= 3600.0;
  return out;
}

}  // namespace

TEST_CASE("generator is deterministic") {
  const auto a = generate(GeneratorConfig{});
  const auto b = generate(GeneratorConfig{});
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  GeneratorConfig other;
  other.seed = 2;
  CHECK_FALSE(generate(other).first == a.first);
}

TEST_CASE("default demo has 887 services") {
  const auto [tt, topo] = generate(GeneratorConfig{});
  CHECK(tt.size() == 887);
  CHECK(topo.stations().size() == 16);
  for (const Service& s : tt.services()) {
    CHECK(s.dep_time >= 0);
    CHECK(s.arr_time <= kDayLength);
    CHECK(s.arr_time > s.dep_time);
    CHECK(topo.distance(s.origin, s.destination) < kInf);
  }
}

TEST_CASE("demo density has two rush hours") {
  for (std::uint64_t seed : {1u, 2u, 3u, 17u}) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const auto [tt, topo] = generate(cfg);
    const auto h = hourly_means(density_profile(tt));
    const auto morning = std::max_element(h.begin() + 6, h.begin() + 12);
    const auto evening = std::max_element(h.begin() + 16, h.begin() + 22);
    const double midday = *std::min_element(morning, evening);
    CAPTURE(seed);
    CHECK(midday < 0.75 * *morning);
    CHECK(midday < 0.75 * *evening);
  }
}

TEST_CASE("service count is configurable") {
  for (std::size_t n : {1u, 10u, 250u}) {
    GeneratorConfig cfg;
    cfg.services_target = n;
    CHECK(generate(cfg).first.size() == n);
  }
}

TEST_CASE("demo is solvable under loose bounds") {
  const auto [tt, topo] = generate(GeneratorConfig{});
  const CoverSolution sol = min_fleet(tt, topo, Bounds{0, kInf, kInf, kInf});
  CHECK(sol.fleet_size() >= static_cast<std::size_t>(peak_density(density_profile(tt))));
  CHECK(sol.fleet_size() < tt.size());
}

TEST_CASE("infeasible configurations are rejected") {
  auto code = [](GeneratorConfig cfg) {
    try {
      generate(cfg);
    } catch (const ValidationError& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  GeneratorConfig c;
  c.station_count = 1;
  CHECK(code(c) == ErrorCode::InfeasibleConfig);
  c = {};
  c.services_target = 0;
  CHECK(code(c) == ErrorCode::InfeasibleConfig);
  c = {};
  c.average_speed_kmh = 0;
  CHECK(code(c) == ErrorCode::InfeasibleConfig);
  c = {};
  c.background_weight = c.morning_peak_weight = c.evening_peak_weight = 0;
  CHECK(code(c) == ErrorCode::InfeasibleConfig);
}
