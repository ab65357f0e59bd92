#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "qitags/domain.hpp"
#include "qitags/heuristics.hpp"
#include "qitags/motion.hpp"
#include "qitags/scheduler.hpp"
#include "qitags/solution.hpp"

namespace qitags {

struct SearchNode {
  Allocation alloc;
  double quality = 0.0;
  double naq = 0.0;
  double tbo = 0.0;
  double tetam = 0.0;
  double makespan = 0.0;
  std::size_t depth = 0;  // assignments removed from the root
  ScheduleOutcome schedule;
  bool refined = false;  // travel times come from motion plans
};

struct OpenSnapshotEntry {
  Allocation alloc;
  double quality = 0.0;
  double tbo = 0.0;
};

struct SearchStats {
  std::size_t nodes_expanded = 0;
  std::size_t nodes_generated = 0;
  std::size_t scheduler_calls = 0;
  std::size_t refinement_rounds = 0;
  std::size_t planner_calls = 0;
  std::vector<OpenSnapshotEntry> open_set_snapshot;
};

struct SearchOptions {
  std::optional<double> alpha;  // overrides the problem's alpha
  // Invoked for every parent -> child edge as it is generated.
  std::function<void(const SearchNode& parent, const SearchNode& child)> on_edge;
};

struct SearchResult {
  std::optional<Solution> solution;  // empty means infeasible
  SearchStats stats;
  HeuristicContext context;
  double alpha = kDefaultAlpha;

  bool feasible() const { return solution.has_value(); }
};

// Minimum-TETAM priority set; ties go to the shallower node, then to the
// smaller allocation bit pattern.
class OpenSet {
 public:
  void push(SearchNode node) { nodes_.insert(std::move(node)); }
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  SearchNode pop_min() {
    expects(!nodes_.empty(), "pop from an empty open set");
    return std::move(nodes_.extract(nodes_.begin()).value());
  }

  std::vector<OpenSnapshotEntry> snapshot() const {
    std::vector<OpenSnapshotEntry> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back({n.alloc, n.quality, n.tbo});
    return out;
  }

 private:
  struct Less {
    bool operator()(const SearchNode& a, const SearchNode& b) const {
      if (a.tetam != b.tetam) return a.tetam < b.tetam;
      if (a.depth != b.depth) return a.depth < b.depth;
      return a.alloc < b.alloc;
    }
  };
  std::set<SearchNode, Less> nodes_;
};

inline SearchNode pop_min(OpenSet& open) { return open.pop_min(); }

// Fills big_m when unset and rejects a value below the worst makespan.
inline void resolve_big_m(ProblemDomain& d) {
  const double c_worst = worst_makespan(d);
  if (d.big_m == 0.0) d.big_m = 10.0 * c_worst + 1.0;
  require(d.big_m >= c_worst, "big_m must be at least the worst-case makespan");
}

namespace detail {

class QItagsSearch {
 public:
  QItagsSearch(const ProblemDomain& d, const SearchOptions& opts)
      : domain_(d), opts_(opts), alpha_(opts.alpha.value_or(d.alpha)), cache_(d.world) {
    require(alpha_ >= 0.0 && alpha_ <= 1.0, "alpha must lie in [0,1]");
    ctx_ = make_heuristic_context(d, worst_makespan(d));
  }

  SearchResult run() {
    SearchResult result;
    result.context = ctx_;
    result.alpha = alpha_;

    auto root = evaluate(Allocation::root(domain_.num_tasks(), domain_.num_robots()));
    visited_.insert(root.alloc);
    ++stats_.nodes_generated;
    open_.push(std::move(root));

    while (!open_.empty()) {
      SearchNode node = open_.pop_min();
      if (node.tbo == 0.0 && !node.refined) {
        auto r = schedule_with_motion_plans(domain_, node.alloc, cache_);
        stats_.refinement_rounds += r.rounds;
        node.refined = true;
        set_schedule(node, std::move(r.outcome));
        if (node.tbo == 0.0) {
          result.solution = make_solution(node);
          break;
        }
        open_.push(std::move(node));
        continue;
      }
      if (node.tbo == 0.0) {
        result.solution = make_solution(node);
        break;
      }
      expand(node);
    }

    stats_.planner_calls = cache_.planner_calls();
    stats_.open_set_snapshot = open_.snapshot();
    result.stats = std::move(stats_);
    return result;
  }

 private:
  SearchNode evaluate(Allocation alloc) {
    SearchNode n;
    n.depth = alloc.tasks() * alloc.robots() - alloc.popcount();
    n.quality = domain_.quality(alloc);
    n.naq = naq(n.quality, ctx_);
    ++stats_.scheduler_calls;
    auto outcome = solve_milp(build_constraints(domain_, alloc, euclidean_legs(domain_.world.cell_size())));
    n.alloc = std::move(alloc);
    set_schedule(n, std::move(outcome));
    return n;
  }

  void set_schedule(SearchNode& n, ScheduleOutcome outcome) {
    n.makespan = outcome.optimal() ? outcome.schedule.makespan : kInfinity;
    n.tbo = tbo(n.makespan, ctx_);
    n.tetam = tetam(n.naq, n.tbo, alpha_);
    n.schedule = std::move(outcome);
  }

  void expand(const SearchNode& parent) {
    ++stats_.nodes_expanded;
    for (auto& child_alloc : successors(parent.alloc)) {
      if (!visited_.insert(child_alloc).second) continue;
      auto child = evaluate(std::move(child_alloc));
      ++stats_.nodes_generated;
      if (opts_.on_edge) opts_.on_edge(parent, child);
      open_.push(std::move(child));
    }
  }

  Solution make_solution(const SearchNode& node) {
    Solution s;
    s.allocation = node.alloc;
    s.schedule = node.schedule.schedule;
    s.motion_plans = build_motion_plans(domain_, node.alloc, s.schedule, cache_);
    s.total_quality = node.quality;
    s.naq = node.naq;
    s.tbo = node.tbo;
    s.tetam = node.tetam;
    return s;
  }

  const ProblemDomain& domain_;
  const SearchOptions& opts_;
  double alpha_;
  HeuristicContext ctx_;
  PathCache cache_;
  OpenSet open_;
  std::unordered_set<Allocation, AllocationHash> visited_;
  SearchStats stats_;
};

}  // namespace detail

// Greedy best-first search from the all-ones allocation, removing one
// assignment per edge. Nodes are scored under Euclidean travel; a node that
// meets the budget is re-scheduled on planned paths before it is accepted.
inline SearchResult qitags_solve(const ProblemDomain& domain, const SearchOptions& opts = {}) {
  return detail::QItagsSearch(domain, opts).run();
}

}  // namespace qitags
