#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rakelink/pathcover.hpp"

using namespace rakelink;

namespace {

FeasibilityGraph fig1_graph() {
  const Timetable tt = oracle::fig1_timetable();
  return build_graph(tt, oracle::fig1_topology(tt), oracle::fig1_bounds());
}

std::vector<std::vector<std::string>> link_ids(const CoverSolution& sol, const Timetable& tt) {
  std::vector<std::vector<std::string>> out;
  for (const RakeLink& l : sol.links) {
    out.emplace_back();
    for (std::size_t s : l.services) out.back().push_back(tt[s].service_id);
  }
  return out;
}

}  // namespace

// The five edges of the six-service example admit the three disjoint pairs (1,2), (3,4), (5,6).
TEST_CASE("six-service example matching has three pairs") {
  const FeasibilityGraph g = fig1_graph();
  const BipartiteGraph bg = BipartiteGraph::from_dag(g);
  CHECK(bg.edge_count() == 5);
  CHECK(hopcroft_karp(bg).size() == 3);
  CHECK(augmenting_path_matching(bg).size() == 3);
  CHECK(brute_force_min_cover(g) == 3);
}

TEST_CASE("six-service example minimum fleet") {
  const Timetable tt = oracle::fig1_timetable();
  const CoverSolution sol = min_fleet(tt, oracle::fig1_topology(tt), oracle::fig1_bounds());
  CHECK(sol.fleet_size() == 3);
  CHECK(sol.matching_size == 3);
  CHECK(link_ids(sol, tt) == std::vector<std::vector<std::string>>{{"1", "2"}, {"3", "4"}, {"5", "6"}});
  CHECK(is_valid_cover(fig1_graph(), sol));
}

TEST_CASE("the published two-pair matching decodes to four links") {
  const Timetable tt = oracle::fig1_timetable();
  const FeasibilityGraph g = fig1_graph();
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {2, 5}};
  const CoverSolution sol = extract_cover(g, Matching::from_pairs(6, 6, pairs));
  CHECK(sol.fleet_size() == 4);
  CHECK(link_ids(sol, tt) == std::vector<std::vector<std::string>>{{"1", "2"}, {"3", "6"}, {"4"}, {"5"}});
  CHECK(is_valid_cover(g, sol));
}

TEST_CASE("matching edge cases") {
  const BipartiteGraph empty(4, 4, {});
  CHECK(hopcroft_karp(empty).size() == 0);
  for (std::size_t k : {1u, 3u, 8u}) {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = 0; v < k; ++v) all.emplace_back(u, v);
    CHECK(hopcroft_karp(BipartiteGraph(k, k, all)).size() == k);
  }
}

TEST_CASE("inconsistent matchings are rejected") {
  const std::vector<std::pair<std::size_t, std::size_t>> reuse{{0, 1}, {0, 3}};
  CHECK_THROWS_AS(Matching::from_pairs(6, 6, reuse), ValidationError);
  const std::vector<std::pair<std::size_t, std::size_t>> out_of_range{{0, 9}};
  CHECK_THROWS_AS(Matching::from_pairs(6, 6, out_of_range), ValidationError);
  const std::vector<std::pair<std::size_t, std::size_t>> not_an_edge{{1, 2}};
  CHECK_THROWS_AS(extract_cover(fig1_graph(), Matching::from_pairs(6, 6, not_an_edge)), ValidationError);
}

TEST_CASE("cover extraction follows successors") {
  const FeasibilityGraph chain(3, {{0, 1, 10, 0}, {1, 2, 10, 0}}, Bounds{});
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {1, 2}};
  const CoverSolution sol = extract_cover(chain, Matching::from_pairs(3, 3, pairs));
  REQUIRE(sol.fleet_size() == 1);
  CHECK(sol.links[0].services == std::vector<std::size_t>{0, 1, 2});

  const CoverSolution none = extract_cover(chain, Matching(3, 3));
  CHECK(none.fleet_size() == 3);
}

TEST_CASE("single service needs one rake") {
  const Timetable tt = Timetable::validate({{"only", StationId("X"), StationId("Y"), 10, 20, 1}});
  const std::vector<DistanceRecord> rows{{StationId("X"), StationId("Y"), 1}};
  CHECK(min_fleet(tt, Topology::validate(rows, tt), Bounds{}).fleet_size() == 1);
}

TEST_CASE("brute force on an edgeless graph and its size limit") {
  CHECK(brute_force_min_cover(FeasibilityGraph(5, {}, Bounds{})) == 5);
  CHECK_THROWS_AS(brute_force_min_cover(FeasibilityGraph(kBruteForceLimit + 1, {}, Bounds{})), ValidationError);
}

TEST_CASE("random DAGs agree with brute force") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 150; ++round) {
    const std::size_t n = 1 + round % 9;
    const FeasibilityGraph g = oracle::random_dag(rng, n, 0.15 + 0.05 * (round % 10));
    const CoverSolution sol = extract_cover(g, max_bipartite_matching(g));
    CHECK(is_valid_cover(g, sol));
    CHECK(sol.fleet_size() == brute_force_min_cover(g));
  }
}

TEST_CASE("random timetables agree with brute force") {
  std::mt19937_64 rng(32);
  for (int round = 0; round < 60; ++round) {
    auto [tt, topo] = oracle::random_instance(rng, 1 + round % 9, 3, 2 * 3600);
    const Bounds b{0, 3600, 20, 40};
    const FeasibilityGraph g = build_graph(tt, topo, b);
    CHECK(min_fleet(tt, topo, b).fleet_size() == brute_force_min_cover(g));
  }
}

TEST_CASE("Hopcroft-Karp agrees with Kuhn") {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 200; ++round) {
    const std::size_t left = 1 + rng() % 30;
    const std::size_t right = 1 + rng() % 30;
    const auto edges = oracle::random_bipartite(rng, left, right, 0.02 + 0.01 * (round % 15));
    const BipartiteGraph g(left, right, edges);
    const Matching hk = hopcroft_karp(g);
    CHECK(hk.size() == augmenting_path_matching(g).size());
    for (auto [u, v] : hk.pairs()) CHECK(g.has_edge(u, v));
  }
}

TEST_CASE("cover exports") {
  const Timetable tt = oracle::fig1_timetable();
  const CoverSolution sol = min_fleet(tt, oracle::fig1_topology(tt), oracle::fig1_bounds());
  const json j = cover_to_json(sol, tt);
  CHECK(j.at("fleet_size") == 3);
  CHECK(j.at("links").dump() == R"([["1","2"],["3","4"],["5","6"]])");
  CHECK(j.at("bounds").at("w_max") == 3600);
  CHECK_FALSE(cover_to_json(sol, tt, false).contains("bounds"));
  std::ostringstream csv;
  write_cover_csv(csv, sol, tt);
  CHECK(csv.str().rfind("rake_index,seq,service_id\n", 0) == 0);
}
