// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance               run everything
//   acceptance --only NAME   run one criterion
//   acceptance --list        print the criterion names

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rakelink/demo_data.hpp"
#include "rakelink/objectives.hpp"
#include "rakelink/pareto.hpp"
#include "rakelink/pathcover.hpp"
#include "rakelink/sweep.hpp"

using namespace rakelink;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string links_text(const CoverSolution& sol, const Timetable& tt) {
  std::string out = "[";
  for (std::size_t r = 0; r < sol.links.size(); ++r) {
    out += r ? ",[" : "[";
    for (std::size_t k = 0; k < sol.links[r].services.size(); ++k)
      out += (k ? "," : "") + tt[sol.links[r].services[k]].service_id;
    out += "]";
  }
  return out + "]";
}

// --- shared demo data ----------------------------------------------------------

BoundsGrid demo_grid() {
  return BoundsGrid{{0, 60, 120, 180, 240, 300}, {600, 1200, 1800, 2400, 3600, kInf}, {0, 10, 25, kInf},
                    {20, 40, 60, kInf}};
}

struct Demo {
  Timetable tt;
  Topology topo;
  SweepManifest manifest;
  double sweep_seconds = 0;
};

const Demo& demo() {
  static const Demo d = [] {
    auto [tt, topo] = generate(GeneratorConfig{});
    const auto t0 = Clock::now();
    SweepManifest m = run_sweep(tt, topo, demo_grid(), SweepOptions{.keep_solutions = false});
    return Demo{std::move(tt), std::move(topo), std::move(m), seconds_since(t0)};
  }();
  return d;
}

// --- criteria ----------------------------------------------------------------

Outcome fig1() {
  const Timetable tt = oracle::fig1_timetable();
  const Topology topo = oracle::fig1_topology(tt);
  const auto t0 = Clock::now();
  const FeasibilityGraph g = build_graph(tt, topo, oracle::fig1_bounds());
  const Matching m = max_bipartite_matching(g);
  const CoverSolution sol = extract_cover(g, m);
  const double ms = seconds_since(t0) * 1000.0;

  std::vector<std::pair<std::string, std::string>> edges;
  for (const LinkEdge& e : g.edges()) edges.emplace_back(tt[e.from].service_id, tt[e.to].service_id);
  const bool graph_ok =
      edges == std::vector<std::pair<std::string, std::string>>{{"1", "2"}, {"1", "4"}, {"3", "4"}, {"3", "6"}, {"5", "6"}};
  const std::string links = links_text(sol, tt);
  const bool pass = graph_ok && m.size() == 2 && sol.fleet_size() == 4 && links == "[[1,2],[3,6],[4],[5]]" && ms < 1.0;
  std::ostringstream d;
  d << "edges " << (graph_ok ? "as drawn" : "differ") << ", nu=" << m.size() << " (expected 2), fleet="
    << sol.fleet_size() << " (expected 4), links=" << links << ", " << ms << " ms";
  return {pass, d.str()};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  const auto t0 = Clock::now();
  std::size_t cases = 0, mismatches = 0;
  for (int round = 0; round < 240; ++round, ++cases) {
    const std::size_t n = 1 + round % 9;
    const FeasibilityGraph g = oracle::random_dag(rng, n, 0.1 + 0.04 * (round % 15));
    const CoverSolution sol = extract_cover(g, max_bipartite_matching(g));
    if (!is_valid_cover(g, sol) || sol.fleet_size() != brute_force_min_cover(g)) ++mismatches;
  }
  for (int round = 0; round < 60; ++round, ++cases) {
    auto [tt, topo] = oracle::random_instance(rng, 1 + round % 9, 3, 2 * 3600);
    const Bounds b{0, 2400, 25, 40};
    const FeasibilityGraph g = build_graph(tt, topo, b);
    if (min_fleet(tt, topo, b).fleet_size() != brute_force_min_cover(g)) ++mismatches;
  }
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << cases << " instances (n<=9), " << mismatches << " mismatches, " << s << " s";
  return {mismatches == 0 && cases >= 200 && s < 10.0, d.str()};
}

Outcome matching_crosscheck() {
  std::mt19937_64 rng(99);
  std::size_t cases = 0, mismatches = 0;
  for (int round = 0; round < 600; ++round, ++cases) {
    const std::size_t left = 1 + rng() % 40;
    const std::size_t right = 1 + rng() % 40;
    const double p = std::uniform_real_distribution<double>(0.01, 0.3)(rng);
    const BipartiteGraph g(left, right, oracle::random_bipartite(rng, left, right, p));
    const Matching hk = hopcroft_karp(g);
    bool ok = hk.size() == augmenting_path_matching(g).size();
    for (auto [u, v] : hk.pairs()) ok = ok && g.has_edge(u, v);
    if (!ok) ++mismatches;
  }
  std::ostringstream d;
  d << cases << " graphs up to 40+40, " << mismatches << " mismatches";
  return {mismatches == 0 && cases >= 500, d.str()};
}

Outcome lower_bound() {
  const Demo& dm = demo();
  const int peak = peak_density(density_profile(dm.tt));
  std::size_t solved = 0, violations = 0;
  for (const SweepRecord& r : dm.manifest.records) {
    if (!r.ok()) continue;
    ++solved;
    if (r.objectives->f1 < peak) ++violations;
  }
  const std::size_t total = generate_grid(demo_grid()).size();
  std::ostringstream d;
  d << dm.tt.size() << " services, peak " << peak << ", " << solved << "/" << total << " records solved, "
    << violations << " violations, grid " << dm.sweep_seconds << " s";
  return {violations == 0 && solved == total && dm.tt.size() == 887 && dm.sweep_seconds < 60.0, d.str()};
}

Outcome monotonicity() {
  const Demo& dm = demo();
  std::map<std::tuple<double, double, double, double>, std::int64_t> f1;
  for (const SweepRecord& r : dm.manifest.records)
    if (r.ok()) f1[{r.bounds.w_min, r.bounds.w_max, r.bounds.d_max, r.bounds.v_avg_max}] = r.objectives->f1;

  const BoundsGrid g = demo_grid();
  auto next_up = [](const std::vector<double>& values, double v) -> std::optional<double> {
    auto it = std::upper_bound(values.begin(), values.end(), v);
    if (it == values.end()) return std::nullopt;
    return *it;
  };
  std::size_t steps = 0, violations = 0;
  for (const auto& [key, value] : f1) {
    auto [w_min, w_max, d_max, v] = key;
    std::vector<std::tuple<double, double, double, double>> relaxed;
    auto lower = std::find(g.w_min_values.begin(), g.w_min_values.end(), w_min);
    if (lower != g.w_min_values.begin()) relaxed.emplace_back(*(lower - 1), w_max, d_max, v);
    if (auto x = next_up(g.w_max_values, w_max)) relaxed.emplace_back(w_min, *x, d_max, v);
    if (auto x = next_up(g.d_max_values, d_max)) relaxed.emplace_back(w_min, w_max, *x, v);
    if (auto x = next_up(g.v_values, v)) relaxed.emplace_back(w_min, w_max, d_max, *x);
    for (const auto& k : relaxed) {
      auto it = f1.find(k);
      if (it == f1.end()) continue;
      ++steps;
      if (it->second > value) ++violations;
    }
  }
  std::ostringstream d;
  d << steps << " single-bound relaxation steps, " << violations << " violations";
  return {violations == 0 && steps > 0, d.str()};
}

Outcome grid_filter() {
  const auto tuples = generate_grid(BoundsGrid::paper());
  std::size_t bad = 0;
  for (const Bounds& b : tuples)
    if (!(b.w_max > b.w_min) || b.w_min == kInf) ++bad;
  std::ostringstream d;
  d << tuples.size() << " combinations (regression value 30576), " << bad
    << " inadmissible";
  return {bad == 0 && tuples.size() == 30576, d.str()};
}

Outcome pareto_correctness() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 9);
  std::vector<std::array<double, 5>> pts(300);
  for (auto& p : pts)
    for (double& x : p) x = level(rng);
  const FrontAssignment fa = sort_fronts<double, 5>(pts);
  const bool same = fa.front_of == oracle::peel_fronts<5>(pts);
  std::size_t intra = 0, orphans = 0;
  for (std::size_t f = 0; f < fa.fronts.size(); ++f) {
    for (std::size_t p : fa.fronts[f]) {
      for (std::size_t q : fa.fronts[f])
        if (dominates<double, 5>(pts[q], pts[p])) ++intra;
      if (f == 0) continue;
      const auto& up = fa.fronts[f - 1];
      if (std::none_of(up.begin(), up.end(), [&](std::size_t q) { return dominates<double, 5>(pts[q], pts[p]); }))
        ++orphans;
    }
  }
  std::ostringstream d;
  d << pts.size() << " points, " << fa.front_count() << " fronts, peeling " << (same ? "identical" : "differs")
    << ", " << intra << " intra-front dominations, " << orphans << " records without a witness";
  return {same && intra == 0 && orphans == 0, d.str()};
}

Outcome cluster_correctness() {
  std::size_t mismatched = 0;
  std::ostringstream d;
  auto check = [&](const std::vector<std::array<double, 5>>& pts, const char* label) {
    const FrontAssignment fa = sort_fronts<double, 5>(pts);
    const auto clusters = find_clusters<double, 5>(fa, pts);
    std::map<std::size_t, std::size_t> per_front;
    for (const auto& c : clusters) {
      ++per_front[c.front];
      for (std::size_t p : c.members)
        if (pts[p] != c.representative) ++mismatched;
    }
    const std::set<std::array<double, 5>> unique(pts.begin(), pts.end());
    if (per_front != oracle::group_by<5>(pts, fa.front_of)) ++mismatched;
    if (clusters.size() != unique.size()) ++mismatched;
    d << label << ": " << pts.size() << " records, " << clusters.size() << " clusters, " << unique.size()
      << " unique vectors; ";
  };

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> level(0, 4);
  std::vector<std::array<double, 5>> random(250);
  for (auto& p : random)
    for (double& x : p) x = level(rng);
  for (int k = 0; k < 100; ++k) random.push_back(random[rng() % random.size()]);
  check(random, "random");
  check(objective_table(demo().manifest.records).points, "demo sweep");
  d << mismatched << " mismatches";
  return {mismatched == 0, d.str()};
}

Outcome determinism() {
  const Demo& dm = demo();
  oracle::TempDir a("acc-det1"), b("acc-det8");
  const auto one = run_sweep_to_directory(dm.tt, dm.topo, demo_grid(), a.path(), 1);
  const auto eight = run_sweep_to_directory(dm.tt, dm.topo, demo_grid(), b.path(), 8);
  const std::string x = read_file(one / "manifest.jsonl");
  const std::string y = read_file(eight / "manifest.jsonl");
  std::ostringstream d;
  d << "1 worker " << x.size() << " bytes, 8 workers " << y.size() << " bytes, "
    << (x == y ? "identical" : "different");
  return {x == y && !x.empty(), d.str()};
}

Outcome improvement_report_criterion() {
  const auto& records = demo().manifest.records;
  // the baseline is a solved record made slightly worse on every objective
  const SweepRecord* best = nullptr;
  for (const SweepRecord& r : records)
    if (r.ok() && (!best || r.objectives->f1 < best->objectives->f1)) best = &r;
  if (!best) return {false, "no solved records"};
  const ObjectiveVector& o = *best->objectives;
  const ObjectiveVector baseline{o.f1 + 1, o.f2 + 60, o.f3 + 0.5, o.f4 + 0.1, o.f5 + 1.0};
  const ImprovementReport report = improvement_report(records, baseline);

  std::size_t wrong = 0;
  for (unsigned mask = 1; mask < 32; ++mask) {
    std::size_t expected = 0;
    for (const SweepRecord& r : records) {
      if (!r.ok()) continue;
      const auto v = r.objectives->as_array();
      const auto b = baseline.as_array();
      bool all = true;
      for (unsigned k = 0; k < 5; ++k)
        if ((mask >> k & 1u) && !(v[k] < b[k])) all = false;
      expected += all;
    }
    if (report.counts[mask] != expected) ++wrong;
  }
  std::ostringstream d;
  d << "f1+f2+f3+f4+f5 count " << report.counts[31] << ", " << report.dominating.size()
    << " dominating records, " << wrong << " subset counts differ from brute force";
  return {report.counts[31] >= 1 && wrong == 0, d.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"fig1", fig1},
      {"oracle_equivalence", oracle_equivalence},
      {"matching_crosscheck", matching_crosscheck},
      {"lower_bound", lower_bound},
      {"monotonicity", monotonicity},
      {"grid_filter", grid_filter},
      {"pareto_correctness", pareto_correctness},
      {"cluster_correctness", cluster_correctness},
      {"determinism", determinism},
      {"improvement_report", improvement_report_criterion},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc) {
      only = argv[++k];
    } else if (std::strcmp(argv[k], "--list") == 0) {
      for (const auto& [name, fn] : criteria()) std::cout << name << '\n';
      return 0;
    } else {
      std::cerr << "usage: acceptance [--only NAME | --list]\n";
      return 2;
    }
  }

  int failures = 0;
  bool matched = false;
  for (const auto& [name, fn] : criteria()) {
    if (!only.empty() && name != only) continue;
    matched = true;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
