#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rakelink/feasgraph.hpp"

namespace rakelink {

inline constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

/// Bipartite graph U x V in compressed adjacency form; U-side rows keep insertion order.
class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t left, std::size_t right, std::span<const std::pair<std::size_t, std::size_t>> edges);

  /// The image of a feasibility DAG: u_i -- v_j for every edge i -> j.
  static BipartiteGraph from_dag(const FeasibilityGraph& g);

  std::size_t left_size() const noexcept { return left_; }
  std::size_t right_size() const noexcept { return right_; }
  std::size_t edge_count() const noexcept { return targets_.size(); }
  std::span<const std::size_t> neighbors(std::size_t u) const {
    return std::span<const std::size_t>(targets_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
  }
  bool has_edge(std::size_t u, std::size_t v) const;

 private:
  std::size_t left_;
  std::size_t right_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
};

/**
 * @brief A set of (u, v) pairs with no shared endpoint.
 *
 * `mate_of_left[u]` is the matched v or kUnmatched, and vice versa. In the
 * path-cover setting mate_of_left is the successor map.
 */
struct Matching {
  std::vector<std::size_t> mate_of_left;
  std::vector<std::size_t> mate_of_right;

  Matching() = default;
  Matching(std::size_t left, std::size_t right) : mate_of_left(left, kUnmatched), mate_of_right(right, kUnmatched) {}

  /// Throws ValidationError(InconsistentMatching) if an endpoint is reused or out of range.
  static Matching from_pairs(std::size_t left, std::size_t right,
                             std::span<const std::pair<std::size_t, std::size_t>> pairs);

  std::size_t size() const;
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
  bool operator==(const Matching&) const = default;
};

/// Hopcroft-Karp, O(E sqrt(V)). Deterministic for a given adjacency order.
Matching hopcroft_karp(const BipartiteGraph& g);

/// Kuhn's single augmenting path per left vertex, O(V E). Kept as an oracle.
Matching augmenting_path_matching(const BipartiteGraph& g);

Matching max_bipartite_matching(const FeasibilityGraph& g);

/// One rake's chronological chain of service indices.
struct RakeLink {
  std::vector<std::size_t> services;

  std::size_t length() const noexcept { return services.size(); }
  bool operator==(const RakeLink&) const = default;
};

struct CoverSolution {
  std::vector<RakeLink> links;  // ordered by first service index
  std::size_t matching_size = 0;
  Bounds bounds;

  std::size_t fleet_size() const noexcept { return links.size(); }
};

/// successor(i) = j iff (u_i, v_j) is matched. Throws InconsistentMatching if a pair is not a DAG edge.
CoverSolution extract_cover(const FeasibilityGraph& g, const Matching& m);

/// build_graph -> max_bipartite_matching -> extract_cover.
CoverSolution min_fleet(const Timetable& tt, const Topology& topo, const Bounds& b);

inline constexpr std::size_t kBruteForceLimit = 12;

/// Exhaustive search over successor assignments; throws TooLarge above kBruteForceLimit nodes.
std::size_t brute_force_min_cover(const FeasibilityGraph& g);

/// Links partition the services and every consecutive pair is an edge of g.
bool is_valid_cover(const FeasibilityGraph& g, const CoverSolution& sol);

/// {fleet_size, links: [[service_id...]...], bounds}
json cover_to_json(const CoverSolution& sol, const Timetable& tt, bool include_bounds = true);
/// rake_index,seq,service_id
void write_cover_csv(std::ostream& out, const CoverSolution& sol, const Timetable& tt);

}  // namespace rakelink
