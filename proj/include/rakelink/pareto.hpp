#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "rakelink/sweep.hpp"

namespace rakelink {

/// Objective point with M minimized components.
template <typename Scalar, std::size_t M>
using Point = std::array<Scalar, M>;

/// True iff a <= b componentwise and a < b in at least one component.
template <typename Scalar, std::size_t M>
bool dominates(const Point<Scalar, M>& a, const Point<Scalar, M>& b) {
  bool strictly = false;
  for (std::size_t k = 0; k < M; ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  return dominates<double, 5>(a.as_array(), b.as_array());
}

struct FrontAssignment {
  std::vector<std::size_t> front_of;             // 1-based front number per point
  std::vector<std::vector<std::size_t>> fronts;  // point indices, ascending within each front

  std::size_t front_count() const noexcept { return fronts.size(); }
};

/**
 * @brief Non-dominated sorting into successive Pareto fronts.
 *
 * Points are visited in lexicographic order, so every dominator of a point
 * is placed before the point itself. A point then lands in the first front
 * holding none of its dominators; by transitivity that is exactly the front
 * produced by repeated peeling. Memory is O(N).
 */
template <typename Scalar, std::size_t M>
FrontAssignment sort_fronts(std::span<const Point<Scalar, M>> points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  FrontAssignment fa;
  fa.front_of.assign(n, 0);
  for (std::size_t p : order) {
    std::size_t k = 0;
    for (; k < fa.fronts.size(); ++k) {
      const auto& front = fa.fronts[k];
      // recently added members are the closest in lexicographic order
      const bool blocked = std::any_of(front.rbegin(), front.rend(),
                                       [&](std::size_t q) { return dominates<Scalar, M>(points[q], points[p]); });
      if (!blocked) break;
    }
    if (k == fa.fronts.size()) fa.fronts.emplace_back();
    fa.fronts[k].push_back(p);
    fa.front_of[p] = k + 1;
  }
  for (auto& front : fa.fronts) std::sort(front.begin(), front.end());
  return fa;
}

/// Componentwise minimum of each front's members. A row is generally not any single member.
template <typename Scalar, std::size_t M>
std::vector<Point<Scalar, M>> front_minima(const FrontAssignment& fa, std::span<const Point<Scalar, M>> points) {
  std::vector<Point<Scalar, M>> out;
  out.reserve(fa.fronts.size());
  for (const auto& front : fa.fronts) {
    Point<Scalar, M> lo = points[front.front()];
    for (std::size_t p : front)
      for (std::size_t k = 0; k < M; ++k) lo[k] = std::min(lo[k], points[p][k]);
    out.push_back(lo);
  }
  return out;
}

template <typename Scalar, std::size_t M>
struct Cluster {
  std::size_t front = 0;       // 1-based
  std::size_t cluster_id = 0;  // 1-based within its front
  std::vector<std::size_t> members;
  Point<Scalar, M> representative{};  // the lowest-index member's point
  Point<Scalar, M> epsilon{};
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

template <typename Scalar, std::size_t M>
bool within(const Point<Scalar, M>& a, const Point<Scalar, M>& b, const Point<Scalar, M>& eps) {
  for (std::size_t k = 0; k < M; ++k) {
    const Scalar gap = a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
    if (!(gap <= eps[k])) return false;
  }
  return true;
}

}  // namespace detail

/**
 * @brief Groups points of each front in objective space.
 *
 * With eps = 0 a cluster is a set of identical vectors. With eps > 0 two
 * points are linked when every component differs by at most eps[k], and
 * clusters are the connected components (single linkage). Clusters are
 * numbered per front in order of their lowest member index.
 */
template <typename Scalar, std::size_t M>
std::vector<Cluster<Scalar, M>> find_clusters(const FrontAssignment& fa, std::span<const Point<Scalar, M>> points,
                                              const Point<Scalar, M>& eps = {}) {
  std::vector<Cluster<Scalar, M>> out;
  for (std::size_t f = 0; f < fa.fronts.size(); ++f) {
    const auto& front = fa.fronts[f];
    std::vector<std::size_t> root_of(front.size());

    const bool exact = std::all_of(eps.begin(), eps.end(), [](Scalar e) { return e == Scalar{0}; });
    if (exact) {
      std::map<Point<Scalar, M>, std::size_t> first_seen;
      for (std::size_t i = 0; i < front.size(); ++i)
        root_of[i] = first_seen.try_emplace(points[front[i]], i).first->second;
    } else {
      // sort by the first component so only a window of candidates is compared
      std::vector<std::size_t> by_first(front.size());
      std::iota(by_first.begin(), by_first.end(), std::size_t{0});
      std::sort(by_first.begin(), by_first.end(), [&](std::size_t a, std::size_t b) {
        return points[front[a]][0] < points[front[b]][0] || (points[front[a]][0] == points[front[b]][0] && a < b);
      });
      detail::DisjointSets sets(front.size());
      for (std::size_t x = 0; x < by_first.size(); ++x) {
        const auto& px = points[front[by_first[x]]];
        for (std::size_t y = x + 1; y < by_first.size(); ++y) {
          const auto& py = points[front[by_first[y]]];
          if (py[0] - px[0] > eps[0]) break;
          if (detail::within<Scalar, M>(px, py, eps)) sets.unite(by_first[x], by_first[y]);
        }
      }
      for (std::size_t i = 0; i < front.size(); ++i) root_of[i] = sets.find(i);
    }

    // roots are the lowest local index of each group, so clusters come out in member order
    std::map<std::size_t, std::size_t> cluster_of_root;
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < front.size(); ++i) {
      auto [it, fresh] = cluster_of_root.try_emplace(root_of[i], out.size());
      if (fresh) {
        Cluster<Scalar, M> c;
        c.front = f + 1;
        c.cluster_id = out.size() - base + 1;
        c.representative = points[front[i]];
        c.epsilon = eps;
        out.push_back(std::move(c));
      }
      out[it->second].members.push_back(front[i]);
    }
  }
  return out;
}

// --- sweep-record adapters and CSV exports -----------------------------------

using ObjectivePoint = Point<double, 5>;

/// Objective points of the successful records, with their manifest record ids.
struct ObjectiveTable {
  std::vector<ObjectivePoint> points;
  std::vector<std::size_t> record_ids;
};

ObjectiveTable objective_table(const std::vector<SweepRecord>& records);

/// record_id,front
void write_fronts_csv(std::ostream& out, const FrontAssignment& fa, const ObjectiveTable& table);
/// front,min_f1,...,min_f5
void write_front_minima_csv(std::ostream& out, const std::vector<ObjectivePoint>& minima);
/// front,cluster_id,record_id,w_min,w_max,d_max,v_avg_max,f1,...,f5
void write_clusters_csv(std::ostream& out, const std::vector<Cluster<double, 5>>& clusters,
                        const ObjectiveTable& table, const std::vector<SweepRecord>& records);

/// Parses "e" (applied to all five) or "e1,e2,e3,e4,e5".
ObjectivePoint parse_epsilon(const std::string& text);

}  // namespace rakelink
