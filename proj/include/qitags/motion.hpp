#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "qitags/core.hpp"
#include "qitags/heuristics.hpp"

namespace qitags {

struct PathQuery {
  GridCell from;
  GridCell to;

  friend bool operator==(const PathQuery&, const PathQuery&) = default;
  friend auto operator<=>(const PathQuery&, const PathQuery&) = default;
};

struct PathResult {
  std::vector<GridCell> cells;
  double length = 0.0;  // meters

  friend bool operator==(const PathResult&, const PathResult&) = default;
};

// Straight-line distance between cell centers, in meters.
inline double euclidean_estimate(const PathQuery& q, double cell_size) {
  const double dc = q.to.col - q.from.col;
  const double dr = q.to.row - q.from.row;
  return std::sqrt(dc * dc + dr * dr) * cell_size;
}

// A* over the 4-connected free cells with the Euclidean heuristic.
// Neighbors expand N, E, S, W; equal f-values pop the smaller (row, col).
// std::nullopt means the goal is unreachable.
inline std::optional<PathResult> plan_path(const PathQuery& q, const WorldMap& world) {
  require(world.free(q.from) && world.free(q.to), "path endpoints must be free in-bounds cells");
  if (q.from == q.to) return PathResult{{q.from}, 0.0};

  const std::size_t n = static_cast<std::size_t>(world.width()) * world.height();
  std::vector<int> g(n, -1);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::uint8_t> closed(n, 0);
  auto h = [&](GridCell c) { return euclidean_estimate({c, q.to}, 1.0); };

  using Entry = std::tuple<double, int, int>;  // f, row, col
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[world.index(q.from)] = 0;
  open.emplace(h(q.from), q.from.row, q.from.col);

  while (!open.empty()) {
    auto [f, row, col] = open.top();
    open.pop();
    const GridCell v{col, row};
    const std::size_t vi = world.index(v);
    if (closed[vi]) continue;
    closed[vi] = 1;
    if (v == q.to) break;
    for (GridCell w : {GridCell{col, row - 1}, GridCell{col + 1, row}, GridCell{col, row + 1},
                       GridCell{col - 1, row}}) {
      if (!world.free(w)) continue;
      const std::size_t wi = world.index(w);
      if (closed[wi]) continue;
      const int cand = g[vi] + 1;
      if (g[wi] < 0 || cand < g[wi]) {
        g[wi] = cand;
        parent[wi] = vi;
        open.emplace(cand + h(w), w.row, w.col);
      }
    }
  }

  const std::size_t goal = world.index(q.to);
  if (!closed[goal]) return std::nullopt;
  PathResult out;
  for (std::size_t i = goal; i != n; i = parent[i])
    out.cells.push_back({static_cast<int>(i % world.width()), static_cast<int>(i / world.width())});
  std::reverse(out.cells.begin(), out.cells.end());
  out.length = static_cast<double>(out.cells.size() - 1) * world.cell_size();
  return out;
}

inline double travel_time(double path_length, double speed) {
  require(speed > 0.0, "speed must be positive");
  if (std::isinf(path_length)) return kInfinity;
  return path_length / speed;
}

// Memoized planner. Reads are shared, inserts exclusive.
class PathCache {
 public:
  explicit PathCache(const WorldMap& world) : world_(&world) {}

  PathCache(const PathCache&) = delete;
  PathCache& operator=(const PathCache&) = delete;

  const std::optional<PathResult>& plan(const PathQuery& q) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(q); it != entries_.end()) return it->second;
    }
    auto result = plan_path(q, *world_);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(q, std::move(result));
    if (inserted) ++planner_calls_;
    return it->second;
  }

  // Planned length, or nullopt when the leg was never planned.
  std::optional<double> lookup_length(const PathQuery& q) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(q);
    if (it == entries_.end()) return std::nullopt;
    return it->second ? it->second->length : kInfinity;
  }

  bool contains(const PathQuery& q) const {
    std::shared_lock lock(mutex_);
    return entries_.contains(q);
  }

  double planned_length(const PathQuery& q) {
    const auto& r = plan(q);
    return r ? r->length : kInfinity;
  }

  std::size_t planner_calls() const {
    std::shared_lock lock(mutex_);
    return planner_calls_;
  }
  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }
  const WorldMap& world() const { return *world_; }

 private:
  const WorldMap* world_;
  mutable std::shared_mutex mutex_;
  std::map<PathQuery, std::optional<PathResult>> entries_;
  std::size_t planner_calls_ = 0;
};

inline const std::optional<PathResult>& memoized_plan(PathCache& cache, const PathQuery& q) {
  return cache.plan(q);
}

}  // namespace qitags
