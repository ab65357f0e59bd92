#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qitags/domain.hpp"
#include "qitags/motion.hpp"
#include "qitags/scheduler.hpp"

namespace qitags {

struct BoundReport {
  double alpha = 0.0;
  double q_root = 0.0;
  double q_null = 0.0;
  double q_solution = 0.0;
  std::optional<double> q_optimal;  // known only when the oracle ran
  double apriori_bound = 0.0;
  double posthoc_bound = 0.0;
  double tbo_of_best_open = 0.0;
  bool apriori_trivial = false;  // alpha >= 0.5
  bool theorem_applies = false;  // alpha < 0.5 and C_worst >= C_max
  std::optional<double> gap;
  std::optional<bool> holds_apriori;
  std::optional<bool> holds_posthoc;
};

// One robot's move between consecutive stops. from_task = -1 is the start.
struct RobotLeg {
  int robot = 0;
  int from_task = -1;
  int to_task = 0;
  PathResult path;

  friend bool operator==(const RobotLeg&, const RobotLeg&) = default;
};

struct Solution {
  Allocation allocation;
  Schedule schedule;
  std::vector<RobotLeg> motion_plans;
  double total_quality = 0.0;
  double naq = 0.0;
  double tbo = 0.0;
  double tetam = 0.0;
  std::optional<BoundReport> bound_report;
};

// Tasks of robot n ordered by start time (ties by task index).
inline std::vector<int> robot_route(const Allocation& alloc, const Schedule& schedule, int n) {
  std::vector<int> route;
  for (std::size_t m = 0; m < alloc.tasks(); ++m)
    if (alloc.get(m, n)) route.push_back(static_cast<int>(m));
  std::stable_sort(route.begin(), route.end(), [&](int a, int b) {
    return schedule.start_times[a] < schedule.start_times[b];
  });
  return route;
}

inline PathQuery route_leg(const ProblemDomain& d, int robot, int from_task, int to_task) {
  const GridCell from =
      from_task < 0 ? d.robots[robot].start_cell : d.network.tasks[from_task].end_site;
  return {from, d.network.tasks[to_task].start_site};
}

inline std::vector<RobotLeg> build_motion_plans(const ProblemDomain& d, const Allocation& alloc,
                                                const Schedule& schedule, PathCache& cache) {
  std::vector<RobotLeg> plans;
  for (std::size_t n = 0; n < d.num_robots(); ++n) {
    int prev = -1;
    for (int t : robot_route(alloc, schedule, static_cast<int>(n))) {
      const auto& path = cache.plan(route_leg(d, static_cast<int>(n), prev, t));
      expects(path.has_value(), "solution uses a leg with no collision-free path");
      plans.push_back({static_cast<int>(n), prev, t, *path});
      prev = t;
    }
  }
  return plans;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;  // e.g. empty coalitions; not violations

  bool valid() const { return violations.empty(); }
};

inline ValidationReport validate_solution(const ProblemDomain& d, const Solution& sol) {
  ValidationReport r;
  auto fail = [&r](std::string s) { r.violations.push_back(std::move(s)); };
  const std::size_t m = d.num_tasks();
  const auto& s = sol.schedule.start_times;
  if (sol.allocation.tasks() != m || sol.allocation.robots() != d.num_robots()) {
    fail("allocation dimensions do not match the problem");
    return r;
  }
  if (s.size() != m) {
    fail("schedule does not cover every task");
    return r;
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (s[i] < 0.0) fail("task " + std::to_string(i) + " starts before time zero");
    if (sol.allocation.coalition(i).empty())
      r.warnings.push_back("task " + std::to_string(i) + " has an empty coalition");
  }
  double realized = 0.0;
  for (std::size_t i = 0; i < m; ++i) realized = std::max(realized, s[i] + d.network.tasks[i].duration);
  if (std::abs(realized - sol.schedule.makespan) > kTolerance)
    fail("recorded makespan differs from the schedule's completion time");
  if (sol.schedule.makespan > d.time_budget) fail("makespan exceeds the time budget");

  PathCache cache(d.world);
  const auto cs = build_constraints(d, sol.allocation, planned_legs(cache));
  for (std::size_t i = 0; i < m; ++i)
    if (s[i] < cs.initial_offsets[i] - kTolerance)
      fail("task " + std::to_string(i) + " starts before its coalition can arrive");
  for (const auto& e : cs.precedence)
    if (s[e.to] < s[e.from] + cs.durations[e.from] + e.travel - kTolerance)
      fail("precedence " + std::to_string(e.from) + "->" + std::to_string(e.to) + " violated");
  for (const auto& p : cs.mutex_pairs) {
    const bool ij = s[p.j] >= s[p.i] + cs.durations[p.i] + p.travel_ij - kTolerance;
    const bool ji = s[p.i] >= s[p.j] + cs.durations[p.j] + p.travel_ji - kTolerance;
    if (!ij && !ji)
      fail("mutex/travel " + std::to_string(p.i) + "," + std::to_string(p.j) + " violated");
  }

  // Motion plans must match each robot's route leg for leg.
  for (std::size_t n = 0; n < d.num_robots(); ++n) {
    std::vector<const RobotLeg*> legs;
    for (const auto& leg : sol.motion_plans)
      if (leg.robot == static_cast<int>(n)) legs.push_back(&leg);
    const auto route = robot_route(sol.allocation, sol.schedule, static_cast<int>(n));
    if (legs.size() != route.size()) {
      fail("robot " + std::to_string(n) + " motion plans do not cover its route");
      continue;
    }
    int prev = -1;
    for (std::size_t k = 0; k < route.size(); ++k) {
      const RobotLeg& leg = *legs[k];
      const std::string tag = "robot " + std::to_string(n) + " leg " + std::to_string(k);
      const auto want = route_leg(d, static_cast<int>(n), prev, route[k]);
      if (leg.from_task != prev || leg.to_task != route[k]) fail(tag + " visits tasks out of order");
      const auto& cells = leg.path.cells;
      if (cells.empty() || cells.front() != want.from || cells.back() != want.to) {
        fail(tag + " endpoints are wrong");
      } else {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (!d.world.free(cells[c])) fail(tag + " passes through an occupied cell");
          if (c > 0 && std::abs(cells[c].col - cells[c - 1].col) +
                               std::abs(cells[c].row - cells[c - 1].row) != 1)
            fail(tag + " is not 4-connected");
        }
      }
      const double length = static_cast<double>(cells.empty() ? 0 : cells.size() - 1) *
                            d.world.cell_size();
      const double duration = travel_time(length, d.robots[n].speed);
      const double ready = prev < 0 ? 0.0 : s[prev] + d.network.tasks[prev].duration;
      if (ready + duration > s[route[k]] + kTolerance)
        fail(tag + " takes longer than the scheduled gap");
      prev = route[k];
    }
  }
  return r;
}

}  // namespace qitags
