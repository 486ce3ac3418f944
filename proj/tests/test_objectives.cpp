#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rakelink/demo_data.hpp"
#include "rakelink/objectives.hpp"

using namespace rakelink;

namespace {

Topology single_station(const Timetable& tt) {
  const std::vector<DistanceRecord> rows{{StationId("X"), StationId("X"), 0}};
  return Topology::validate(rows, tt);
}

CoverSolution cover_of(std::vector<std::vector<std::size_t>> links) {
  CoverSolution sol;
  for (auto& l : links) sol.links.push_back({std::move(l)});
  return sol;
}

}  // namespace

TEST_CASE("one link over a chain") {
  const Timetable tt = Timetable::validate({{"a", StationId("X"), StationId("X"), 0, 100, 10},
                                            {"b", StationId("X"), StationId("X"), 700, 800, 10},
                                            {"c", StationId("X"), StationId("X"), 1100, 1200, 10}});
  const ObjectiveVector o = evaluate(cover_of({{0, 1, 2}}), tt, single_station(tt));
  CHECK(o == ObjectiveVector{1, 600, 0.0, 0.0, 0.0});
}

TEST_CASE("all singletons") {
  std::vector<Service> s;
  for (int k = 0; k < 5; ++k) s.push_back({"s" + std::to_string(k), StationId("X"), StationId("X"), k, k + 50, 10});
  const Timetable tt = Timetable::validate(std::move(s));
  const ObjectiveVector o = evaluate(cover_of({{0}, {1}, {2}, {3}, {4}}), tt, single_station(tt));
  CHECK(o == ObjectiveVector{5, 0, 0.0, 0.0, 0.0});
}

TEST_CASE("population standard deviations") {
  const Timetable tt = Timetable::validate({{"a", StationId("X"), StationId("X"), 0, 10, 10},
                                            {"b", StationId("X"), StationId("X"), 20, 30, 5},
                                            {"c", StationId("X"), StationId("X"), 40, 50, 10},
                                            {"d", StationId("X"), StationId("X"), 60, 70, 15}});
  const ObjectiveVector o = evaluate(cover_of({{0}, {1, 2, 3}}), tt, single_station(tt));
  CHECK(o.f1 == 2);
  CHECK(o.f2 == 10);
  CHECK(o.f4 == doctest::Approx(1.0));
  CHECK(o.f5 == doctest::Approx(10.0));
  CHECK(population_stddev({1, 3}) == doctest::Approx(1.0));
  CHECK(population_stddev({}) == 0.0);
  CHECK(population_stddev({0.1, 0.2, 0.7}) == population_stddev({0.7, 0.1, 0.2}));
}

TEST_CASE("f3 is the longest realized deadhead") {
  const Timetable tt = oracle::fig1_timetable();
  const Topology topo = oracle::fig1_topology(tt);
  const Bounds b{0, kInf, kInf, kInf};
  const CoverSolution sol = min_fleet(tt, topo, b);
  const ObjectiveVector o = evaluate(sol, tt, topo);
  double worst = 0;
  for (const RakeLink& l : sol.links)
    for (std::size_t k = 1; k < l.services.size(); ++k)
      worst = std::max(worst, topo.distance(tt[l.services[k - 1]].destination, tt[l.services[k]].origin));
  CHECK(o.f3 == worst);
}

TEST_CASE("invalid covers are rejected") {
  const Timetable tt = oracle::fig1_timetable();
  const Topology topo = oracle::fig1_topology(tt);
  CHECK_THROWS_AS(evaluate(cover_of({{0, 1}, {2, 3}}), tt, topo), ValidationError);            // missing 4, 5
  CHECK_THROWS_AS(evaluate(cover_of({{0, 1}, {1, 2}, {3, 4, 5}}), tt, topo), ValidationError);  // duplicate
  CHECK_THROWS_AS(evaluate(cover_of({{1, 0}, {2}, {3}, {4}, {5}}), tt, topo), ValidationError);  // backwards
  CHECK_THROWS_AS(evaluate(cover_of({{0, 1, 2, 3, 4, 5, 6}}), tt, topo), ValidationError);       // out of range
}

TEST_CASE("realized objectives respect the bounds") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 30; ++round) {
    auto [tt, topo] = oracle::random_instance(rng, 60, 5);
    const Bounds b{60, 600.0 + 300 * (round % 8), 5.0 * (round % 6), 30};
    const ObjectiveVector o = evaluate(min_fleet(tt, topo, b), tt, topo);
    CHECK(o.f1 >= 1);
    CHECK(static_cast<double>(o.f2) <= b.w_max);
    CHECK(o.f3 <= b.d_max);
    CHECK(o.f4 >= 0);
    CHECK(o.f5 >= 0);
  }
}

TEST_CASE("objective JSON keeps key order") {
  const ObjectiveVector o{99, 37920, 37.44, 3.7296, 129.61827};
  const std::string text = to_json(o).dump();
  CHECK(text == R"({"f1":99,"f2":37920,"f3":37.44,"f4":3.7296,"f5":129.61827})");
  CHECK(objectives_from_json(json::parse(text)) == o);
}

TEST_CASE("density of simple timetables") {
  const Timetable one = Timetable::validate({{"a", StationId("X"), StationId("Y"), 10, 20, 1}});
  const DensityProfile dp = density_profile(one);
  REQUIRE(dp.counts.size() == static_cast<std::size_t>(kDayLength));
  for (Seconds t = 0; t < 40; ++t) CHECK(dp.counts[t] == (t >= 10 && t < 20 ? 1 : 0));
  CHECK(peak_density(dp) == 1);

  const Timetable two = Timetable::validate({{"a", StationId("X"), StationId("Y"), 0, 100, 1},
                                             {"b", StationId("X"), StationId("Y"), 50, 150, 1}});
  const DensityProfile dp2 = density_profile(two);
  CHECK(peak_density(dp2) == 2);
  for (Seconds t = 0; t < 200; ++t) CHECK((dp2.counts[t] == 2) == (t >= 50 && t < 100));

  CHECK(peak_density(DensityProfile{std::vector<std::int32_t>(kDayLength, 0)}) == 0);
}

TEST_CASE("three overlapping services need three rakes") {
  const Timetable tt = Timetable::validate({{"1", StationId("X"), StationId("A"), 500, 3000, 1},
                                            {"3", StationId("Y"), StationId("A"), 1000, 3500, 1},
                                            {"5", StationId("Z"), StationId("A"), 2000, 4000, 1}});
  const int peak = peak_density(density_profile(tt));
  CHECK(peak >= 3);
  const auto recount = oracle::density_recount(tt);
  CHECK(peak == *std::max_element(recount.begin(), recount.end()));
}

TEST_CASE("demo density equals a per-second recount") {
  const auto [tt, topo] = generate(GeneratorConfig{});
  const DensityProfile dp = density_profile(tt);
  const auto recount = oracle::density_recount(tt);
  CHECK(dp.counts == recount);
  CHECK(peak_density(dp) == *std::max_element(recount.begin(), recount.end()));
}

TEST_CASE("fleet never drops below peak density") {
  const auto [tt, topo] = generate(GeneratorConfig{});
  const int peak = peak_density(density_profile(tt));
  for (const Bounds& b : {Bounds{0, kInf, kInf, kInf}, Bounds{60, 1800, 10, 40}, Bounds{300, 600, 0, 20}})
    CHECK(static_cast<int>(min_fleet(tt, topo, b).fleet_size()) >= peak);
}

TEST_CASE("density CSV") {
  const Timetable tt = Timetable::validate({{"a", StationId("X"), StationId("Y"), 10, 20, 1}});
  std::ostringstream dense, rle;
  write_density_csv(dense, density_profile(tt));
  write_density_csv(rle, density_profile(tt), true);
  CHECK(dense.str().rfind("second,count\n0,0\n1,0\n", 0) == 0);
  CHECK(rle.str() == "second,count\n0,0\n10,1\n20,0\n");
}
