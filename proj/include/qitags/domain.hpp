#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "qitags/core.hpp"
#include "qitags/quality.hpp"

namespace qitags {

inline constexpr double kDefaultAlpha = 0.4;

struct ProblemDomain {
  TaskNetwork network;
  std::vector<Robot> robots;
  Matrix traits;  // N x U, kept in sync with robots by finalize()
  std::vector<TraitQualityMap> quality_maps;
  WorldMap world;
  double time_budget = 1.0;
  double alpha = kDefaultAlpha;
  double big_m = 0.0;               // 0 until resolved against the worst makespan
  std::vector<double> trait_scale;  // per-trait divisor applied before quality maps
  std::optional<std::uint64_t> seed;

  std::size_t num_tasks() const { return network.tasks.size(); }
  std::size_t num_robots() const { return robots.size(); }
  std::size_t num_traits() const { return traits.cols(); }

  double quality(const Allocation& a) const {
    return total_allocation_quality(a, traits, quality_maps, trait_scale);
  }

  bool monotone_quality() const {
    for (const auto& q : quality_maps)
      if (!q.monotone()) return false;
    return true;
  }

  friend bool operator==(const ProblemDomain&, const ProblemDomain&) = default;
};

namespace detail {

inline std::vector<int> free_components(const WorldMap& world) {
  std::vector<int> comp(static_cast<std::size_t>(world.width()) * world.height(), -1);
  int next = 0;
  for (int r = 0; r < world.height(); ++r)
    for (int c = 0; c < world.width(); ++c) {
      GridCell s{c, r};
      if (!world.free(s) || comp[world.index(s)] >= 0) continue;
      std::queue<GridCell> q;
      q.push(s);
      comp[world.index(s)] = next;
      while (!q.empty()) {
        GridCell v = q.front();
        q.pop();
        for (GridCell w : {GridCell{v.col, v.row - 1}, GridCell{v.col + 1, v.row},
                           GridCell{v.col, v.row + 1}, GridCell{v.col - 1, v.row}})
          if (world.free(w) && comp[world.index(w)] < 0) {
            comp[world.index(w)] = next;
            q.push(w);
          }
      }
      ++next;
    }
  return comp;
}

}  // namespace detail

// Rebuilds the trait matrix and checks every structural invariant.
// Sites that cannot reach one another are rejected here, since such a
// problem has no schedulable root allocation.
inline void finalize(ProblemDomain& d) {
  require(!d.robots.empty(), "problem needs at least one robot");
  require(!d.network.tasks.empty(), "problem needs at least one task");
  d.traits = team_trait_matrix(d.robots);
  validate_network(d.network);
  require(d.quality_maps.size() == d.num_tasks(), "need one quality map per task");
  require(d.time_budget > 0.0, "time_budget must be positive");
  require(d.alpha >= 0.0 && d.alpha <= 1.0, "alpha must lie in [0,1]");
  require(d.big_m >= 0.0, "big_m must be positive");
  if (!d.trait_scale.empty()) {
    require(d.trait_scale.size() == d.num_traits(), "trait_scale length must equal trait count");
    for (double s : d.trait_scale) require(s > 0.0, "trait_scale entries must be positive");
  }
  for (const auto& q : d.quality_maps)
    if (const auto* lin = std::get_if<LinearQualityMap>(&q.variant()))
      require(lin->weights.size() == d.num_traits(), "quality weights length must equal trait count");

  std::vector<GridCell> sites;
  for (const auto& r : d.robots) {
    require(r.speed > 0.0, "robot speed must be positive");
    require(d.world.free(r.start_cell), "robot start must be a free in-bounds cell");
    sites.push_back(r.start_cell);
  }
  for (const auto& t : d.network.tasks) {
    require(d.world.free(t.start_site) && d.world.free(t.end_site),
            "task sites must be free in-bounds cells");
    sites.push_back(t.start_site);
    sites.push_back(t.end_site);
  }
  const auto comp = detail::free_components(d.world);
  for (const auto& s : sites)
    require(comp[d.world.index(s)] == comp[d.world.index(sites.front())],
            "all robot starts and task sites must be mutually reachable");
}

}  // namespace qitags
