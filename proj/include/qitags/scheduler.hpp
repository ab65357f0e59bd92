#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qitags/domain.hpp"
#include "qitags/heuristics.hpp"
#include "qitags/motion.hpp"

namespace qitags {

// Leg length in meters for a robot moving between two cells; +inf when no
// path exists.
using LegLength = std::function<double(const PathQuery&)>;

inline LegLength euclidean_legs(double cell_size) {
  return [cell_size](const PathQuery& q) { return euclidean_estimate(q, cell_size); };
}

// Planned lengths for legs already in the cache, Euclidean otherwise.
inline LegLength refined_legs(const PathCache& cache) {
  return [&cache](const PathQuery& q) {
    if (auto planned = cache.lookup_length(q)) return *planned;
    return euclidean_estimate(q, cache.world().cell_size());
  };
}

// Planned lengths for every leg (plans on demand).
inline LegLength planned_legs(PathCache& cache) {
  return [&cache](const PathQuery& q) { return cache.planned_length(q); };
}

struct PrecedenceEdge {
  int from = 0;
  int to = 0;
  double travel = 0.0;
  std::optional<PathQuery> leg;  // set when the two coalitions share a robot
};

struct MutexPair {
  int i = 0;  // i < j
  int j = 0;
  double travel_ij = 0.0;  // end_i -> start_j
  double travel_ji = 0.0;  // end_j -> start_i
  std::optional<PathQuery> leg_ij;
  std::optional<PathQuery> leg_ji;
};

struct ConstraintSet {
  std::vector<double> durations;
  std::vector<double> initial_offsets;              // x_i
  std::vector<std::vector<PathQuery>> initial_legs;  // robot start -> start site, per task
  std::vector<PrecedenceEdge> precedence;
  std::vector<MutexPair> mutex_pairs;  // disjunctions, precedence-related pairs removed
  double big_m = 0.0;
  bool infeasible_on_construction = false;

  std::size_t num_tasks() const { return durations.size(); }
};

struct Schedule {
  std::vector<double> start_times;
  double makespan = 0.0;
  std::map<std::pair<int, int>, int> orderings;  // (i, j), i < j -> p_ij

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct ScheduleOutcome {
  enum class Status { Optimal, Infeasible };
  Status status = Status::Infeasible;
  Schedule schedule;
  std::size_t nodes_explored = 0;

  bool optimal() const { return status == Status::Optimal; }
};

// Orientation per mutex pair: 1 means i before j (p_ij = 1), 0 means j
// before i, -1 leaves the disjunction out.
using PairOrder = std::vector<std::int8_t>;

namespace detail {

inline double coalition_time(const std::vector<int>& robots, const std::vector<Robot>& team,
                             const PathQuery& leg, const LegLength& len) {
  double worst = 0.0;
  if (robots.empty()) return worst;
  const double length = len(leg);
  for (int n : robots) worst = std::max(worst, travel_time(length, team[n].speed));
  return worst;
}

inline std::vector<int> shared_robots(const Allocation& a, std::size_t i, std::size_t j) {
  std::vector<int> out;
  for (std::size_t n = 0; n < a.robots(); ++n)
    if (a.get(i, n) && a.get(j, n)) out.push_back(static_cast<int>(n));
  return out;
}

}  // namespace detail

inline ConstraintSet build_constraints(const ProblemDomain& domain, const Allocation& alloc,
                                       const LegLength& len) {
  require(alloc.tasks() == domain.num_tasks() && alloc.robots() == domain.num_robots(),
          "allocation dimensions do not match the problem");
  const auto& tasks = domain.network.tasks;
  const std::size_t m = tasks.size();
  ConstraintSet cs;
  cs.big_m = domain.big_m;
  cs.durations.resize(m);
  cs.initial_offsets.assign(m, 0.0);
  cs.initial_legs.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    cs.durations[i] = tasks[i].duration;
    for (int n : alloc.coalition(i)) {
      PathQuery leg{domain.robots[n].start_cell, tasks[i].start_site};
      cs.initial_offsets[i] =
          std::max(cs.initial_offsets[i], travel_time(len(leg), domain.robots[n].speed));
      cs.initial_legs[i].push_back(leg);
    }
  }

  std::set<std::pair<int, int>> related;
  for (auto [i, j] : domain.network.precedence) {
    PrecedenceEdge e{i, j, 0.0, std::nullopt};
    const auto shared = detail::shared_robots(alloc, i, j);
    if (!shared.empty()) {
      e.leg = PathQuery{tasks[i].end_site, tasks[j].start_site};
      e.travel = detail::coalition_time(shared, domain.robots, *e.leg, len);
    }
    cs.precedence.push_back(e);
    related.insert({std::min(i, j), std::max(i, j)});
  }

  std::set<std::pair<int, int>> disjunctive;
  for (auto [i, j] : domain.network.mutex) disjunctive.insert({std::min(i, j), std::max(i, j)});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (!detail::shared_robots(alloc, i, j).empty())
        disjunctive.insert({static_cast<int>(i), static_cast<int>(j)});

  for (auto [i, j] : disjunctive) {
    if (related.contains({i, j})) continue;
    MutexPair p{i, j, 0.0, 0.0, std::nullopt, std::nullopt};
    const auto shared = detail::shared_robots(alloc, i, j);
    if (!shared.empty()) {
      p.leg_ij = PathQuery{tasks[i].end_site, tasks[j].start_site};
      p.leg_ji = PathQuery{tasks[j].end_site, tasks[i].start_site};
      p.travel_ij = detail::coalition_time(shared, domain.robots, *p.leg_ij, len);
      p.travel_ji = detail::coalition_time(shared, domain.robots, *p.leg_ji, len);
    }
    if (std::isinf(p.travel_ij) && std::isinf(p.travel_ji)) cs.infeasible_on_construction = true;
    cs.mutex_pairs.push_back(p);
  }
  return cs;
}

// Earliest start times for a fixed orientation of the disjunctions (pairs
// set to -1 are dropped, which relaxes the problem). std::nullopt when the
// difference constraints are inconsistent.
inline std::optional<std::vector<double>> earliest_starts(const ConstraintSet& cs,
                                                          const PairOrder& order) {
  require(order.size() == cs.mutex_pairs.size(), "order must cover every mutex pair");
  const std::size_t m = cs.num_tasks();
  struct Edge {
    int to;
    double weight;
  };
  std::vector<std::vector<Edge>> out(m);
  std::vector<int> indeg(m, 0);
  auto add = [&](int from, int to, double travel) {
    if (std::isinf(travel)) return false;
    out[from].push_back({to, cs.durations[from] + travel});
    ++indeg[to];
    return true;
  };
  for (const auto& e : cs.precedence)
    if (!add(e.from, e.to, e.travel)) return std::nullopt;
  for (std::size_t k = 0; k < cs.mutex_pairs.size(); ++k) {
    const auto& p = cs.mutex_pairs[k];
    if (order[k] == 1 && !add(p.i, p.j, p.travel_ij)) return std::nullopt;
    if (order[k] == 0 && !add(p.j, p.i, p.travel_ji)) return std::nullopt;
  }

  std::vector<double> start(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (std::isinf(cs.initial_offsets[i])) return std::nullopt;
    start[i] = cs.initial_offsets[i];
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < m; ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  std::size_t seen = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& e : out[v]) {
      start[e.to] = std::max(start[e.to], start[v] + e.weight);
      if (--indeg[e.to] == 0) ready.push_back(e.to);
    }
  }
  // Durations are positive, so any cycle is a positive cycle.
  if (seen != m) return std::nullopt;
  return start;
}

inline double makespan_of(const ConstraintSet& cs, const std::vector<double>& starts) {
  double c = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) c = std::max(c, starts[i] + cs.durations[i]);
  return c;
}

// Makespan for a complete orientation, or std::nullopt when infeasible.
inline std::optional<double> evaluate_fixed_order(const ConstraintSet& cs, const PairOrder& order) {
  require(order.size() == cs.mutex_pairs.size(), "order must cover every mutex pair");
  for (auto o : order) require(o == 0 || o == 1, "every mutex pair needs an orientation");
  if (cs.infeasible_on_construction) return std::nullopt;
  auto s = earliest_starts(cs, order);
  if (!s) return std::nullopt;
  return makespan_of(cs, *s);
}

namespace detail {

class BranchAndBound {
 public:
  explicit BranchAndBound(const ConstraintSet& cs) : cs_(cs) {
    branch_order_.resize(cs.mutex_pairs.size());
    for (std::size_t k = 0; k < branch_order_.size(); ++k) branch_order_[k] = k;
    std::stable_sort(branch_order_.begin(), branch_order_.end(), [&](std::size_t a, std::size_t b) {
      const auto& pa = cs.mutex_pairs[a];
      const auto& pb = cs.mutex_pairs[b];
      return std::max(pa.travel_ij, pa.travel_ji) > std::max(pb.travel_ij, pb.travel_ji);
    });
  }

  ScheduleOutcome run() {
    ScheduleOutcome out;
    if (!cs_.infeasible_on_construction) {
      PairOrder order(cs_.mutex_pairs.size(), -1);
      visit(order);
    }
    out.nodes_explored = nodes_;
    if (best_starts_) {
      out.status = ScheduleOutcome::Status::Optimal;
      out.schedule.start_times = *best_starts_;
      out.schedule.makespan = incumbent_;
      for (std::size_t k = 0; k < cs_.mutex_pairs.size(); ++k)
        out.schedule.orderings[{cs_.mutex_pairs[k].i, cs_.mutex_pairs[k].j}] = best_order_[k];
    }
    return out;
  }

 private:
  bool before(const std::vector<double>& s, const MutexPair& p, bool i_first) const {
    return i_first ? s[p.j] >= s[p.i] + cs_.durations[p.i] + p.travel_ij
                   : s[p.i] >= s[p.j] + cs_.durations[p.j] + p.travel_ji;
  }

  void visit(PairOrder& order) {
    ++nodes_;
    auto relaxed = earliest_starts(cs_, order);
    if (!relaxed) return;
    const double lb = makespan_of(cs_, *relaxed);
    if (best_starts_ && lb >= incumbent_) return;

    // Branch on the first open disjunction the relaxed schedule violates.
    std::optional<std::size_t> branch;
    for (std::size_t k : branch_order_) {
      if (order[k] != -1) continue;
      const auto& p = cs_.mutex_pairs[k];
      if (!before(*relaxed, p, true) && !before(*relaxed, p, false)) {
        branch = k;
        break;
      }
    }

    if (!branch) {
      // Relaxed schedule already satisfies every open disjunction.
      incumbent_ = lb;
      best_starts_ = std::move(*relaxed);
      best_order_ = order;
      for (std::size_t k = 0; k < order.size(); ++k)
        if (best_order_[k] == -1)
          best_order_[k] = before(*best_starts_, cs_.mutex_pairs[k], true) ? 1 : 0;
      return;
    }

    const auto& p = cs_.mutex_pairs[*branch];
    const std::int8_t first = (*relaxed)[p.i] <= (*relaxed)[p.j] ? 1 : 0;
    for (std::int8_t v : {first, static_cast<std::int8_t>(1 - first)}) {
      order[*branch] = v;
      visit(order);
    }
    order[*branch] = -1;
  }

  const ConstraintSet& cs_;
  std::vector<std::size_t> branch_order_;
  std::size_t nodes_ = 0;
  double incumbent_ = kInfinity;
  std::optional<std::vector<double>> best_starts_;
  PairOrder best_order_;
};

}  // namespace detail

// Exact minimum-makespan schedule by depth-first branch and bound over the
// disjunctions. The bound at a node is the longest path with the undecided
// disjunctions dropped.
inline ScheduleOutcome solve_milp(const ConstraintSet& cs) {
  return detail::BranchAndBound(cs).run();
}

// Makespan of the all-robots-on-every-task allocation under Euclidean travel.
inline double worst_makespan(const ProblemDomain& domain) {
  const auto root = Allocation::root(domain.num_tasks(), domain.num_robots());
  const auto outcome =
      solve_milp(build_constraints(domain, root, euclidean_legs(domain.world.cell_size())));
  require(outcome.optimal(), "root allocation cannot be scheduled");
  return outcome.schedule.makespan;
}

inline HeuristicContext make_heuristic_context(const ProblemDomain& domain, double c_worst) {
  const auto q_root = domain.quality(Allocation::root(domain.num_tasks(), domain.num_robots()));
  const auto q_null = domain.quality(Allocation::null(domain.num_tasks(), domain.num_robots()));
  return {q_root, q_null, domain.time_budget, c_worst};
}

// Legs whose travel times the schedule actually relies on: every initial
// leg, precedence legs, and the chosen direction of each disjunction.
inline std::vector<PathQuery> legs_used(const ConstraintSet& cs, const Schedule& schedule) {
  std::set<PathQuery> legs;
  for (const auto& v : cs.initial_legs) legs.insert(v.begin(), v.end());
  for (const auto& e : cs.precedence)
    if (e.leg) legs.insert(*e.leg);
  for (const auto& p : cs.mutex_pairs) {
    auto it = schedule.orderings.find({p.i, p.j});
    if (it == schedule.orderings.end()) continue;
    const auto& leg = it->second == 1 ? p.leg_ij : p.leg_ji;
    if (leg) legs.insert(*leg);
  }
  return {legs.begin(), legs.end()};
}

struct RefineResult {
  ConstraintSet constraints;
  bool changed = false;
  std::size_t newly_planned = 0;
};

// Plans every leg the schedule uses that is not yet memoized and rebuilds the
// constraints with planned lengths. `changed` is true iff some travel
// quantity grew by more than the tolerance.
inline RefineResult refine_with_motion_plans(const ProblemDomain& domain, const Allocation& alloc,
                                             const ConstraintSet& current, const Schedule& schedule,
                                             PathCache& cache) {
  RefineResult out;
  const auto estimate = refined_legs(cache);
  for (const auto& leg : legs_used(current, schedule)) {
    if (cache.contains(leg)) continue;
    const double before = estimate(leg);
    const double after = cache.planned_length(leg);
    ++out.newly_planned;
    if (after > before + kTolerance) out.changed = true;
  }
  out.constraints = build_constraints(domain, alloc, refined_legs(cache));
  return out;
}

struct RefinedSchedule {
  ConstraintSet constraints;
  ScheduleOutcome outcome;
  bool changed = false;
  std::size_t rounds = 0;
};

// Re-solve / refine until every leg the schedule uses is planned. Each round
// plans at least one new leg, so the loop ends within |legs| + 1 rounds.
inline RefinedSchedule schedule_with_motion_plans(const ProblemDomain& domain,
                                                  const Allocation& alloc, PathCache& cache) {
  RefinedSchedule r;
  r.constraints = build_constraints(domain, alloc, refined_legs(cache));
  while (true) {
    ++r.rounds;
    r.outcome = solve_milp(r.constraints);
    if (!r.outcome.optimal()) return r;
    auto step = refine_with_motion_plans(domain, alloc, r.constraints, r.outcome.schedule, cache);
    r.changed = r.changed || step.changed;
    if (step.newly_planned == 0) return r;
    r.constraints = std::move(step.constraints);
  }
}

}  // namespace qitags
