#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qitags/domain.hpp"
#include "qitags/heuristics.hpp"
#include "qitags/motion.hpp"
#include "qitags/scheduler.hpp"
#include "qitags/search.hpp"
#include "qitags/solution.hpp"

namespace qitags {

// alpha / (1 - alpha) * (q_root - q_null); +inf at alpha = 1.
inline double apriori_bound(double alpha, double q_root, double q_null) {
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
  expects(q_root >= q_null - kTolerance, "q_root must not be below q_null");
  if (alpha == 1.0) return kInfinity;
  return alpha / (1.0 - alpha) * (q_root - q_null);
}

// A-priori bound scaled by the TBO of the best-quality open node.
inline double posthoc_bound(double alpha, double q_root, double q_null, double tbo_best_open) {
  expects(tbo_best_open >= 0.0, "TBO must be non-negative");
  const double base = apriori_bound(alpha, q_root, q_null);
  if (base == 0.0 || tbo_best_open == 0.0) return 0.0;
  return base * tbo_best_open;
}

// TBO of the open node with the highest quality (lowest TBO among equals);
// 0 when the open set was empty.
inline double tbo_of_best_open(const std::vector<OpenSnapshotEntry>& open) {
  if (open.empty()) return 0.0;
  const OpenSnapshotEntry* best = &open.front();
  for (const auto& e : open)
    if (e.quality > best->quality || (e.quality == best->quality && e.tbo < best->tbo)) best = &e;
  return best->tbo;
}

inline BoundReport make_bound_report(const SearchResult& result,
                                     std::optional<double> q_optimal = std::nullopt) {
  expects(result.feasible(), "bound report needs a solution");
  BoundReport b;
  const auto& ctx = result.context;
  b.alpha = result.alpha;
  b.q_root = ctx.q_root;
  b.q_null = ctx.q_null;
  b.q_solution = result.solution->total_quality;
  b.apriori_bound = apriori_bound(b.alpha, b.q_root, b.q_null);
  b.tbo_of_best_open = tbo_of_best_open(result.stats.open_set_snapshot);
  b.posthoc_bound = posthoc_bound(b.alpha, b.q_root, b.q_null, b.tbo_of_best_open);
  b.apriori_trivial = b.alpha >= 0.5;
  b.theorem_applies = b.alpha < 0.5 && ctx.c_worst >= ctx.c_max;
  if (q_optimal) {
    b.q_optimal = q_optimal;
    b.gap = *q_optimal - b.q_solution;
    b.holds_apriori = *b.gap <= b.apriori_bound + kTolerance;
    b.holds_posthoc = *b.gap <= b.posthoc_bound + kTolerance;
  }
  return b;
}

inline constexpr std::size_t kOracleMaxEntries = 20;

struct OracleResult {
  std::optional<Allocation> best;  // empty: no allocation meets the budget
  double best_quality = 0.0;
  Schedule schedule;
  std::size_t allocations = 0;  // enumerated
  std::size_t scheduled = 0;    // scheduling problems solved

  bool feasible() const { return best.has_value(); }
};

// Exhaustive optimum over all 2^(M N) allocations, scheduled on planned
// paths. Allocations are visited in (quality desc, bit pattern asc) order,
// so the first one that meets the budget is the answer.
inline OracleResult brute_force_optimal(const ProblemDomain& d) {
  const std::size_t m = d.num_tasks();
  const std::size_t n = d.num_robots();
  if (m * n > kOracleMaxEntries)
    throw InvalidInput("brute-force oracle refused: M*N = " + std::to_string(m * n) +
                       " exceeds the limit of " + std::to_string(kOracleMaxEntries));
  const std::uint64_t count = std::uint64_t{1} << (m * n);

  struct Candidate {
    double quality;
    std::uint64_t code;
  };
  std::vector<Candidate> all;
  all.reserve(count);
  for (std::uint64_t c = 0; c < count; ++c)
    all.push_back({d.quality(Allocation::from_code(m, n, c)), c});
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.code < b.code;
  });

  OracleResult out;
  out.allocations = count;
  PathCache cache(d.world);
  const auto legs = planned_legs(cache);
  for (const auto& cand : all) {
    const auto alloc = Allocation::from_code(m, n, cand.code);
    ++out.scheduled;
    const auto outcome = solve_milp(build_constraints(d, alloc, legs));
    if (outcome.optimal() && outcome.schedule.makespan <= d.time_budget) {
      out.best = alloc;
      out.best_quality = cand.quality;
      out.schedule = outcome.schedule;
      break;
    }
  }
  return out;
}

struct SweepRow {
  double alpha = 0.0;
  bool feasible = false;
  double quality = std::numeric_limits<double>::quiet_NaN();
  double makespan = std::numeric_limits<double>::quiet_NaN();
  double norm_gap = std::numeric_limits<double>::quiet_NaN();
  double norm_apriori_bound = std::numeric_limits<double>::quiet_NaN();
  double norm_posthoc_bound = std::numeric_limits<double>::quiet_NaN();
  bool holds_apriori = false;
  bool holds_posthoc = false;
  std::optional<Solution> solution;
  std::optional<BoundReport> report;
};

inline std::vector<double> default_sweep_alphas() {
  std::vector<double> a;
  for (int k = 0; k <= 10; ++k) a.push_back(k / 10.0);
  return a;
}

// Solves the problem once per alpha and normalizes gaps and bounds by
// (q_root - q_null). `oracle` may be passed in to avoid recomputation.
inline std::vector<SweepRow> alpha_sweep(const ProblemDomain& d, const std::vector<double>& alphas,
                                         const OracleResult* oracle = nullptr) {
  OracleResult local;
  if (!oracle) {
    local = brute_force_optimal(d);
    oracle = &local;
  }
  std::vector<SweepRow> rows;
  for (double a : alphas) {
    require(a >= 0.0 && a <= 1.0, "alpha must lie in [0,1]");
    SearchOptions opts;
    opts.alpha = a;
    const auto result = qitags_solve(d, opts);
    SweepRow row;
    row.alpha = a;
    row.feasible = result.feasible();
    if (result.feasible()) {
      std::optional<double> q_opt;
      if (oracle->feasible()) q_opt = oracle->best_quality;
      const auto report = make_bound_report(result, q_opt);
      const double span = report.q_root - report.q_null;
      auto norm = [span](double v) { return span > kTolerance ? v / span : 0.0; };
      row.quality = result.solution->total_quality;
      row.makespan = result.solution->schedule.makespan;
      row.norm_apriori_bound = norm(report.apriori_bound);
      row.norm_posthoc_bound = norm(report.posthoc_bound);
      if (report.gap) {
        row.norm_gap = norm(*report.gap);
        row.holds_apriori = *report.holds_apriori;
        row.holds_posthoc = *report.holds_posthoc;
      }
      row.solution = result.solution;
      row.report = report;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct GeneratorConfig {
  std::vector<int> robots{3, 4, 5};
  std::vector<int> tasks{2, 3, 4};
  std::vector<int> traits{2, 3};
  int map_size = 12;
  double obstacle_fraction = 0.10;
  double precedence_prob = 0.3;
  double mutex_prob = 0.2;
  std::size_t max_entries = kOracleMaxEntries;
};

// Seeded random instance with linear quality maps and a budget drawn
// between the null allocation's planned makespan and the worst makespan.
inline ProblemDomain generate_instance(std::uint64_t seed, const GeneratorConfig& cfg = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](const std::vector<int>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  int n = pick(cfg.robots);
  int m = pick(cfg.tasks);
  while (static_cast<std::size_t>(n * m) > cfg.max_entries) --n;
  const int u = pick(cfg.traits);

  ProblemDomain d;
  d.world = WorldMap(cfg.map_size, cfg.map_size, 1.0);
  for (int r = 0; r < cfg.map_size; ++r)
    for (int c = 0; c < cfg.map_size; ++c)
      if (unit(rng) < cfg.obstacle_fraction) d.world.set_occupied({c, r}, true);

  // Sites come from the largest free component.
  const auto comp = detail::free_components(d.world);
  std::vector<int> sizes;
  for (int id : comp)
    if (id >= 0) {
      if (static_cast<std::size_t>(id) >= sizes.size()) sizes.resize(id + 1, 0);
      ++sizes[id];
    }
  const int main_comp =
      static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<GridCell> cells;
  for (int r = 0; r < cfg.map_size; ++r)
    for (int c = 0; c < cfg.map_size; ++c)
      if (comp[d.world.index({c, r})] == main_comp) cells.push_back({c, r});
  auto random_cell = [&] {
    return cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
  };

  for (int i = 0; i < n; ++i) {
    Robot r;
    r.id = i;
    for (int k = 0; k < u; ++k) r.traits.push_back(unit(rng));
    r.start_cell = random_cell();
    r.speed = 0.5 + 1.5 * unit(rng);
    d.robots.push_back(r);
  }
  for (int j = 0; j < m; ++j) {
    Task t;
    t.id = j;
    t.duration = 1.0 + 9.0 * unit(rng);
    t.start_site = random_cell();
    t.end_site = random_cell();
    d.network.tasks.push_back(t);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (unit(rng) < cfg.precedence_prob)
        d.network.precedence.push_back({i, j});
      else if (unit(rng) < cfg.mutex_prob)
        d.network.mutex.push_back({i, j});
    }

  std::vector<double> team_total(u, 0.0);
  for (const auto& r : d.robots)
    for (int k = 0; k < u; ++k) team_total[k] += r.traits[k];
  for (int j = 0; j < m; ++j) {
    LinearQualityMap lin;
    double full = 0.0;
    for (int k = 0; k < u; ++k) {
      lin.weights.push_back(unit(rng));
      full += lin.weights.back() * team_total[k];
    }
    // Some tasks saturate before the whole team is assigned.
    lin.normalizer = std::max(full * (0.5 + 0.5 * unit(rng)), 1e-6);
    d.quality_maps.emplace_back(lin);
  }

  d.alpha = kDefaultAlpha;
  d.time_budget = 1.0;
  d.seed = seed;
  finalize(d);
  const double c_worst = worst_makespan(d);
  PathCache cache(d.world);
  const auto null_outcome =
      solve_milp(build_constraints(d, Allocation::null(m, n), planned_legs(cache)));
  const double lo = null_outcome.schedule.makespan;
  d.time_budget = lo + unit(rng) * std::max(c_worst - lo, 0.0);
  resolve_big_m(d);
  return d;
}

}  // namespace qitags
