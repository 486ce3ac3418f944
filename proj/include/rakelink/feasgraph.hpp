#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rakelink/io.hpp"
#include "rakelink/model.hpp"

namespace rakelink {

/// A directed edge i -> j: one rake may run service i and then service j.
struct LinkEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Seconds headway = 0;       // dep(j) - arr(i)
  double deadhead_km = 0.0;  // topology distance destination(i) -> origin(j)

  bool operator==(const LinkEdge&) const = default;
};

/// Headway and deadhead of a feasible connection.
struct LinkCost {
  Seconds headway = 0;
  double deadhead_km = 0.0;
};

/**
 * @brief Decides whether one rake can run `i` and then `j` under `b`.
 *
 * All clauses are closed intervals:
 *  - w_min <= h <= w_max, with h = dep(j) - arr(i) and h >= 0 always required;
 *  - d <= d_max, where a pair of unconnected stations never qualifies;
 *  - for d > 0, d * 3600 / h <= v_avg_max. With h = 0 only v_avg_max = inf passes.
 */
std::optional<LinkCost> edge_feasible(const Service& i, const Service& j, const Topology& topo, const Bounds& b);

/**
 * @brief Link feasibility DAG over the services of one timetable.
 *
 * Edges are sorted by (from, to). Because every edge goes from an earlier
 * arrival to a not-earlier departure, index order of a timetable sorted by
 * departure is a topological order.
 */
class FeasibilityGraph {
 public:
  FeasibilityGraph(std::size_t n, std::vector<LinkEdge> edges, Bounds bounds);

  std::size_t size() const noexcept { return n_; }
  std::span<const LinkEdge> edges() const noexcept { return edges_; }
  std::span<const LinkEdge> out_edges(std::size_t i) const {
    return std::span<const LinkEdge>(edges_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  const Bounds& bounds() const noexcept { return bounds_; }

  /// Binary search on the sorted edge list.
  const LinkEdge* find_edge(std::size_t from, std::size_t to) const;
  bool has_edge(std::size_t from, std::size_t to) const { return find_edge(from, to) != nullptr; }

 private:
  std::size_t n_;
  std::vector<LinkEdge> edges_;
  std::vector<std::size_t> offsets_;
  Bounds bounds_;
};

/// Throws ValidationError(InadmissibleBounds) unless b.w_max > b.w_min.
FeasibilityGraph build_graph(const Timetable& tt, const Topology& topo, const Bounds& b);

/// Kahn's algorithm; returns false if a cycle exists.
bool is_acyclic(const FeasibilityGraph& g);

void write_graph_csv(std::ostream& out, const FeasibilityGraph& g, const Timetable& tt);
json graph_to_json(const FeasibilityGraph& g, const Timetable& tt);

}  // namespace rakelink
