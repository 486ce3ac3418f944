#include "rakelink/pathcover.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <queue>

namespace rakelink {

BipartiteGraph::BipartiteGraph(std::size_t left, std::size_t right,
                               std::span<const std::pair<std::size_t, std::size_t>> edges)
    : left_(left), right_(right), offsets_(left + 1, 0), targets_(edges.size()) {
  for (auto [u, v] : edges) {
    if (u >= left || v >= right) throw std::out_of_range("bipartite edge endpoint out of range");
    ++offsets_[u + 1];
  }
  for (std::size_t u = 0; u < left; ++u) offsets_[u + 1] += offsets_[u];
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : edges) targets_[cursor[u]++] = v;
}

BipartiteGraph BipartiteGraph::from_dag(const FeasibilityGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(g.edges().size());
  for (const LinkEdge& e : g.edges()) edges.emplace_back(e.from, e.to);
  return BipartiteGraph(g.size(), g.size(), edges);
}

bool BipartiteGraph::has_edge(std::size_t u, std::size_t v) const {
  if (u >= left_) return false;
  auto row = neighbors(u);
  return std::find(row.begin(), row.end(), v) != row.end();
}

// ---------------------------------------------------------------------------

Matching Matching::from_pairs(std::size_t left, std::size_t right,
                              std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  Matching m(left, right);
  for (auto [u, v] : pairs) {
    const std::string name = "(u" + std::to_string(u) + ", v" + std::to_string(v) + ")";
    if (u >= left || v >= right)
      throw ValidationError(ErrorCode::InconsistentMatching, name, "pair " + name + " is out of range");
    if (m.mate_of_left[u] != kUnmatched || m.mate_of_right[v] != kUnmatched)
      throw ValidationError(ErrorCode::InconsistentMatching, name, "pair " + name + " reuses an endpoint");
    m.mate_of_left[u] = v;
    m.mate_of_right[v] = u;
  }
  return m;
}

std::size_t Matching::size() const {
  return static_cast<std::size_t>(
      std::count_if(mate_of_left.begin(), mate_of_left.end(), [](std::size_t v) { return v != kUnmatched; }));
}

std::vector<std::pair<std::size_t, std::size_t>> Matching::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < mate_of_left.size(); ++u)
    if (mate_of_left[u] != kUnmatched) out.emplace_back(u, mate_of_left[u]);
  return out;
}

// ---------------------------------------------------------------------------

Matching hopcroft_karp(const BipartiteGraph& g) {
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  const std::size_t n = g.left_size();
  Matching m(n, g.right_size());
  std::vector<std::size_t> layer(n);
  std::vector<std::size_t> arc(n);

  // BFS from all free left vertices; returns true if some free right vertex is reachable.
  auto build_layers = [&] {
    std::queue<std::size_t> q;
    for (std::size_t u = 0; u < n; ++u) {
      if (m.mate_of_left[u] == kUnmatched) {
        layer[u] = 0;
        q.push(u);
      } else {
        layer[u] = kFar;
      }
    }
    bool reachable = false;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : g.neighbors(u)) {
        const std::size_t w = m.mate_of_right[v];
        if (w == kUnmatched) {
          reachable = true;
        } else if (layer[w] == kFar) {
          layer[w] = layer[u] + 1;
          q.push(w);
        }
      }
    }
    return reachable;
  };

  std::function<bool(std::size_t)> augment = [&](std::size_t u) -> bool {
    auto row = g.neighbors(u);
    for (; arc[u] < row.size(); ++arc[u]) {
      const std::size_t v = row[arc[u]];
      const std::size_t w = m.mate_of_right[v];
      if (w == kUnmatched || (layer[w] == layer[u] + 1 && augment(w))) {
        m.mate_of_left[u] = v;
        m.mate_of_right[v] = u;
        ++arc[u];
        return true;
      }
    }
    layer[u] = kFar;
    return false;
  };

  while (build_layers()) {
    std::fill(arc.begin(), arc.end(), 0);
    for (std::size_t u = 0; u < n; ++u)
      if (m.mate_of_left[u] == kUnmatched) augment(u);
  }
  return m;
}

Matching augmenting_path_matching(const BipartiteGraph& g) {
  Matching m(g.left_size(), g.right_size());
  std::vector<char> visited(g.right_size());

  std::function<bool(std::size_t)> try_kuhn = [&](std::size_t u) -> bool {
    for (std::size_t v : g.neighbors(u)) {
      if (visited[v]) continue;
      visited[v] = 1;
      if (m.mate_of_right[v] == kUnmatched || try_kuhn(m.mate_of_right[v])) {
        m.mate_of_left[u] = v;
        m.mate_of_right[v] = u;
        return true;
      }
    }
    return false;
  };

  for (std::size_t u = 0; u < g.left_size(); ++u) {
    std::fill(visited.begin(), visited.end(), 0);
    try_kuhn(u);
  }
  return m;
}

Matching max_bipartite_matching(const FeasibilityGraph& g) { return hopcroft_karp(BipartiteGraph::from_dag(g)); }

// ---------------------------------------------------------------------------

CoverSolution extract_cover(const FeasibilityGraph& g, const Matching& m) {
  const std::size_t n = g.size();
  if (m.mate_of_left.size() != n || m.mate_of_right.size() != n)
    throw ValidationError(ErrorCode::InconsistentMatching, "matching", "matching size does not match graph");

  std::size_t matched = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t v = m.mate_of_left[u];
    if (v == kUnmatched) continue;
    const std::string name = "(u" + std::to_string(u) + ", v" + std::to_string(v) + ")";
    if (v >= n || m.mate_of_right[v] != u)
      throw ValidationError(ErrorCode::InconsistentMatching, name, "pair " + name + " is not mirrored");
    if (!g.has_edge(u, v))
      throw ValidationError(ErrorCode::InconsistentMatching, name, "pair " + name + " is not a graph edge");
    ++matched;
  }

  CoverSolution sol;
  sol.matching_size = matched;
  sol.bounds = g.bounds();
  for (std::size_t start = 0; start < n; ++start) {
    if (m.mate_of_right[start] != kUnmatched) continue;  // has a predecessor
    RakeLink link;
    for (std::size_t s = start; s != kUnmatched; s = m.mate_of_left[s]) link.services.push_back(s);
    sol.links.push_back(std::move(link));
  }
  return sol;
}

CoverSolution min_fleet(const Timetable& tt, const Topology& topo, const Bounds& b) {
  const FeasibilityGraph g = build_graph(tt, topo, b);
  return extract_cover(g, max_bipartite_matching(g));
}

std::size_t brute_force_min_cover(const FeasibilityGraph& g) {
  const std::size_t n = g.size();
  if (n > kBruteForceLimit)
    throw ValidationError(ErrorCode::TooLarge, "n",
                          "brute force is limited to " + std::to_string(kBruteForceLimit) + " services");

  // Each node picks at most one successor among its out-neighbours, each
  // node is picked at most once. Every such assignment on a DAG is a path
  // cover with n - (#assignments) paths.
  std::vector<char> taken(n, 0);
  std::size_t best = 0;
  std::function<void(std::size_t, std::size_t)> search = [&](std::size_t node, std::size_t assigned) {
    if (assigned + (n - node) <= best) return;
    if (node == n) {
      best = assigned;
      return;
    }
    for (const LinkEdge& e : g.out_edges(node)) {
      if (taken[e.to]) continue;
      taken[e.to] = 1;
      search(node + 1, assigned + 1);
      taken[e.to] = 0;
    }
    search(node + 1, assigned);
  };
  search(0, 0);
  return n - best;
}

bool is_valid_cover(const FeasibilityGraph& g, const CoverSolution& sol) {
  std::vector<char> seen(g.size(), 0);
  for (const RakeLink& link : sol.links) {
    if (link.services.empty()) return false;
    for (std::size_t k = 0; k < link.services.size(); ++k) {
      const std::size_t s = link.services[k];
      if (s >= g.size() || seen[s]) return false;
      seen[s] = 1;
      if (k > 0 && !g.has_edge(link.services[k - 1], s)) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

json cover_to_json(const CoverSolution& sol, const Timetable& tt, bool include_bounds) {
  json links = json::array();
  for (const RakeLink& link : sol.links) {
    json ids = json::array();
    for (std::size_t s : link.services) ids.push_back(tt[s].service_id);
    links.push_back(std::move(ids));
  }
  json out{{"fleet_size", sol.fleet_size()}, {"links", std::move(links)}};
  if (include_bounds) out["bounds"] = to_json(sol.bounds);
  return out;
}

void write_cover_csv(std::ostream& out, const CoverSolution& sol, const Timetable& tt) {
  out << "rake_index,seq,service_id\n";
  for (std::size_t r = 0; r < sol.links.size(); ++r)
    for (std::size_t k = 0; k < sol.links[r].services.size(); ++k)
      out << r + 1 << ',' << k + 1 << ',' << tt[sol.links[r].services[k]].service_id << '\n';
}

}  // namespace rakelink
