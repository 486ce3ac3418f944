#include "rakelink/feasgraph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace rakelink {
namespace {

std::optional<LinkCost> check_link(Seconds arr_i, Seconds dep_j, double deadhead_km, const Bounds& b) {
  const Seconds h = dep_j - arr_i;
  if (h < 0) return std::nullopt;
  const auto hd = static_cast<double>(h);
  if (hd < b.w_min || hd > b.w_max) return std::nullopt;
  if (!std::isfinite(deadhead_km) || deadhead_km > b.d_max) return std::nullopt;
  if (deadhead_km > 0.0) {
    if (h == 0) {
      if (b.v_avg_max != kInf) return std::nullopt;
    } else if (deadhead_km * 3600.0 > b.v_avg_max * hd) {
      // cross-multiplied so that speed == v_avg_max is an exact tie
      return std::nullopt;
    }
  }
  return LinkCost{h, deadhead_km};
}

}  // namespace

std::optional<LinkCost> edge_feasible(const Service& i, const Service& j, const Topology& topo, const Bounds& b) {
  return check_link(i.arr_time, j.dep_time, topo.distance(i.destination, j.origin), b);
}

FeasibilityGraph::FeasibilityGraph(std::size_t n, std::vector<LinkEdge> edges, Bounds bounds)
    : n_(n), edges_(std::move(edges)), offsets_(n + 1, 0), bounds_(bounds) {
  std::sort(edges_.begin(), edges_.end(),
            [](const LinkEdge& a, const LinkEdge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
  for (const LinkEdge& e : edges_) {
    if (e.from >= n_ || e.to >= n_) throw std::out_of_range("edge endpoint outside graph");
    ++offsets_[e.from + 1];
  }
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
}

const LinkEdge* FeasibilityGraph::find_edge(std::size_t from, std::size_t to) const {
  if (from >= n_) return nullptr;
  auto row = out_edges(from);
  auto it = std::lower_bound(row.begin(), row.end(), to, [](const LinkEdge& e, std::size_t t) { return e.to < t; });
  if (it == row.end() || it->to != to) return nullptr;
  return &*it;
}

FeasibilityGraph build_graph(const Timetable& tt, const Topology& topo, const Bounds& b) {
  b.check_domain();
  if (!b.admissible())
    throw ValidationError(ErrorCode::InadmissibleBounds, "w_max",
                          "w_max (" + format_number(b.w_max) + ") must exceed w_min (" + format_number(b.w_min) + ")");

  const std::size_t n = tt.size();
  const auto services = tt.services();

  std::vector<std::size_t> origin(n);
  std::vector<std::size_t> destination(n);
  std::vector<Seconds> deps(n);
  for (std::size_t i = 0; i < n; ++i) {
    // validated topologies contain every timetable station
    origin[i] = *topo.index_of(services[i].origin);
    destination[i] = *topo.index_of(services[i].destination);
    deps[i] = services[i].dep_time;
  }

  // Departures are sorted, so the candidate successors of i form one
  // contiguous index range [first, last) of departures inside the window.
  std::vector<LinkEdge> edges;
  const double lo = std::max(0.0, b.w_min);
  for (std::size_t i = 0; i < n; ++i) {
    const Seconds arr = services[i].arr_time;
    const Seconds earliest = arr + static_cast<Seconds>(std::ceil(lo));
    auto first = std::lower_bound(deps.begin(), deps.end(), earliest);
    for (auto it = first; it != deps.end(); ++it) {
      if (static_cast<double>(*it - arr) > b.w_max) break;
      const auto j = static_cast<std::size_t>(it - deps.begin());
      if (j == i) continue;
      if (auto cost = check_link(arr, *it, topo.distance(destination[i], origin[j]), b))
        edges.push_back({i, j, cost->headway, cost->deadhead_km});
    }
  }
  return FeasibilityGraph(n, std::move(edges), b);
}

bool is_acyclic(const FeasibilityGraph& g) {
  std::vector<std::size_t> indegree(g.size(), 0);
  for (const LinkEdge& e : g.edges()) ++indegree[e.to];
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (indegree[i] == 0) ready.push(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.pop();
    ++visited;
    for (const LinkEdge& e : g.out_edges(u))
      if (--indegree[e.to] == 0) ready.push(e.to);
  }
  return visited == g.size();
}

void write_graph_csv(std::ostream& out, const FeasibilityGraph& g, const Timetable& tt) {
  out << "from_service,to_service,headway_s,deadhead_km\n";
  for (const LinkEdge& e : g.edges())
    out << tt[e.from].service_id << ',' << tt[e.to].service_id << ',' << e.headway << ','
        << format_number(e.deadhead_km) << '\n';
}

json graph_to_json(const FeasibilityGraph& g, const Timetable& tt) {
  json edges = json::array();
  for (const LinkEdge& e : g.edges()) {
    edges.push_back({{"from_service", tt[e.from].service_id},
                     {"to_service", tt[e.to].service_id},
                     {"headway_s", e.headway},
                     {"deadhead_km", e.deadhead_km}});
  }
  return json{{"bounds", to_json(g.bounds())}, {"n", g.size()}, {"edges", std::move(edges)}};
}

}  // namespace rakelink
