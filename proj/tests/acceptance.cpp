// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qitags/active_learning.hpp"
#include "qitags/analysis.hpp"
#include "support.hpp"

using namespace qitags;

namespace {

constexpr double kBoundTol = 1e-9;
constexpr double kNaqTol = 1e-12;
constexpr double kGpTol = 1e-8;
constexpr std::size_t kBoundInstances = 60;
constexpr double kExtremeShare = 0.95;
constexpr double kCheckpointShare = 0.80;

struct Line {
  int id;
  bool ok;
  std::string text;
};
std::vector<Line> lines;

void report(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, "[%s] criterion %2d: %s (%s; %.1fs)", ok ? "PASS" : "FAIL", id,
                what.c_str(), detail.c_str(), seconds);
  std::fprintf(stderr, "%s\n", buf);
  lines.push_back({id, ok, buf});
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Tallies shared by the bound, extremes and budget criteria.
struct BoundSuite {
  std::size_t instances = 0, runs = 0;
  std::size_t apriori_violations = 0, posthoc_violations = 0, posthoc_above_apriori = 0;
  std::size_t extremes_ok = 0;
  std::size_t solutions = 0, invalid = 0;
  std::size_t infeasible_disagreements = 0;
  std::string first_problem;
};

void note(BoundSuite& s, const std::string& what) {
  if (s.first_problem.empty()) s.first_problem = what;
}

void check_solution(BoundSuite& s, const ProblemDomain& d, const Solution& sol, const std::string& tag) {
  ++s.solutions;
  const auto v = validate_solution(d, sol);
  if (!v.valid() || sol.schedule.makespan > d.time_budget) {
    ++s.invalid;
    note(s, tag + ": " + (v.violations.empty() ? "over budget" : v.violations.front()));
  }
}

BoundSuite run_bound_suite() {
  BoundSuite s;
  const auto alphas = default_sweep_alphas();
  for (std::uint64_t seed = 0; s.instances < kBoundInstances; ++seed) {
    const auto d = generate_instance(seed);
    const double c_worst = worst_makespan(d);
    if (c_worst < d.time_budget) continue;
    ++s.instances;
    const auto oracle = brute_force_optimal(d);
    const auto rows = alpha_sweep(d, alphas, &oracle);
    double q_min = kInfinity, q_max = -kInfinity;
    for (const auto& r : rows) {
      const std::string tag = fmt("seed %llu alpha %.1f", static_cast<unsigned long long>(seed), r.alpha);
      if (r.feasible != oracle.feasible()) {
        ++s.infeasible_disagreements;
        note(s, tag + ": feasibility differs from oracle");
      }
      if (!r.feasible) continue;
      check_solution(s, d, *r.solution, tag);
      q_min = std::min(q_min, r.quality);
      q_max = std::max(q_max, r.quality);
      if (r.alpha >= 0.45) continue;
      ++s.runs;
      const auto& b = *r.report;
      if (!(*b.gap <= b.apriori_bound + kBoundTol)) {
        ++s.apriori_violations;
        note(s, tag + fmt(": gap %.6g > a-priori %.6g", *b.gap, b.apriori_bound));
      }
      if (!(*b.gap <= b.posthoc_bound + kBoundTol)) {
        ++s.posthoc_violations;
        note(s, tag + fmt(": gap %.6g > post-hoc %.6g", *b.gap, b.posthoc_bound));
      }
      if (b.tbo_of_best_open <= 1.0 && b.posthoc_bound > b.apriori_bound) ++s.posthoc_above_apriori;
    }
    if (rows.front().feasible && rows.back().feasible &&
        rows.front().quality >= q_max - kBoundTol && rows.back().quality <= q_min + kBoundTol)
      ++s.extremes_ok;
    else if (!rows.front().feasible && !rows.back().feasible)
      ++s.extremes_ok;
  }
  return s;
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240501);
  std::size_t agree = 0, infeasible = 0;
  const std::size_t total = 200;
  for (std::size_t k = 0; k < total; ++k) {
    const auto cs = oracle::random_constraint_set(rng, 8);
    const auto oracle = oracle::enumerate_makespan(cs);
    const auto out = solve_milp(cs);
    infeasible += !oracle.has_value();
    if (out.optimal() == oracle.has_value() && (!oracle || out.schedule.makespan == *oracle)) ++agree;
  }
  report(5, agree == total, "scheduler equals 2^|M^R| enumeration",
         fmt("%zu/%zu agree, %zu infeasible", agree, total, infeasible), since(t0));
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t edges = 0, violations = 0;
  while (edges < 10000) {
    const std::size_t m = 1 + rng() % 4, n = 1 + rng() % 5, u = 1 + rng() % 4;
    std::vector<Robot> robots(n);
    for (std::size_t i = 0; i < n; ++i) {
      robots[i].id = static_cast<int>(i);
      for (std::size_t k = 0; k < u; ++k) robots[i].traits.push_back(3.0 * unit(rng));
    }
    const auto q = team_trait_matrix(robots);
    std::vector<TraitQualityMap> maps;
    for (std::size_t j = 0; j < m; ++j) {
      LinearQualityMap lin;
      for (std::size_t k = 0; k < u; ++k) lin.weights.push_back(unit(rng) < 0.2 ? 0.0 : unit(rng));
      lin.normalizer = 0.5 + 5.0 * unit(rng);
      maps.emplace_back(lin);
    }
    const HeuristicContext ctx{total_allocation_quality(Allocation::root(m, n), q, maps),
                               total_allocation_quality(Allocation::null(m, n), q, maps), 1.0, 2.0};
    for (int p = 0; p < 20 && edges < 10000; ++p) {
      Allocation parent(m, n);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) parent.set(i, j, unit(rng) < 0.6);
      const double naq_parent = naq(total_allocation_quality(parent, q, maps), ctx);
      for (const auto& child : successors(parent)) {
        if (edges == 10000) break;
        ++edges;
        if (naq(total_allocation_quality(child, q, maps), ctx) < naq_parent - kNaqTol) ++violations;
      }
    }
  }
  report(6, violations == 0, "NAQ non-decreasing along expansion edges",
         fmt("%zu violations over %zu edges", violations, edges), since(t0));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int set = 0; set < 100; ++set) {
    const std::size_t n = 1 + rng() % 50, u = 1 + rng() % 53;
    std::vector<std::vector<double>> x(n, std::vector<double>(u));
    std::vector<double> y(n);
    for (auto& row : x)
      for (auto& v : row) v = unit(rng);
    for (auto& v : y) v = unit(rng);
    GPHyperparameters h{0.05 + 0.5 * unit(rng), (0.3 + 1.5 * unit(rng)) * std::sqrt(double(u)),
                        std::pow(10.0, -6.0 + 4.0 * unit(rng))};
    const auto g = gp_fit(x, y, h);
    const oracle::DenseGP ref{x, y, h.signal_var, h.length_scale, h.noise_var, kPriorMean};
    for (int k = 0; k < 5; ++k) {
      std::vector<double> qv(u);
      for (auto& v : qv) v = unit(rng);
      if (k == 0) qv = x[rng() % n];
      const auto [mean, var] = ref.predict(qv);
      const auto p = g.predict(qv);
      worst = std::max({worst, std::abs(p.mean - mean), std::abs(p.variance - std::max(var, 0.0))});
    }
  }
  report(7, worst <= kGpTol, "GP posterior matches dense direct solve",
         fmt("max abs deviation %.3g over 100 sets", worst), since(t0));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t budget = 50, seeds = 20, first_checkpoint = 10;
  bool all_ok = true;
  std::string detail;
  for (std::size_t pos = 0; pos < kSyntheticPositions; ++pos) {
    const auto data = synthetic_position_dataset(pos, 1000 + pos);
    const auto [pool, eval] = split_dataset(data, 0.2, 7);
    const auto h = default_hyperparameters(data.dim());
    const Labeler labeler = [&pool](std::size_t i, std::span<const double>) { return pool.labels[i]; };
    const auto ent = active_learn(labeler, QueryPool(pool.features), eval, budget, h);
    std::vector<double> mean(budget, 0.0);
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto run = uniform_baseline(labeler, QueryPool(pool.features), eval, budget, h, s);
      for (std::size_t k = 0; k < budget; ++k) mean[k] += run.rmse_trace[k] / seeds;
    }
    std::size_t wins = 0, checkpoints = 0;
    for (std::size_t step = first_checkpoint; step <= budget; ++step, ++checkpoints)
      wins += ent.rmse_trace[step - 1] <= mean[step - 1];
    const bool final_ok = ent.rmse_trace.back() <= mean.back();
    const bool ok = final_ok && wins >= kCheckpointShare * checkpoints;
    all_ok = all_ok && ok;
    detail += fmt("%spos%zu %zu/%zu%s", pos ? ", " : "", pos, wins, checkpoints,
                  final_ok ? "" : " final-worse");
  }
  report(8, all_ok, "max-entropy beats 20-seed uniform mean at >=80% of steps 10..50",
         detail, since(t0));
}

void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(9);
  std::size_t queries = 0, mismatches = 0, inadmissible = 0;
  for (int map = 0; map < 100; ++map) {
    const auto w = oracle::random_world(rng, 20, 0.25);
    std::vector<GridCell> free;
    for (int r = 0; r < w.height(); ++r)
      for (int c = 0; c < w.width(); ++c)
        if (w.free({c, r})) free.push_back({c, r});
    if (free.empty()) continue;
    for (int k = 0; k < 10; ++k) {
      const GridCell a = free[rng() % free.size()], b = free[rng() % free.size()];
      const int bfs = oracle::bfs_distance(w, a, b);
      const auto p = plan_path({a, b}, w);
      ++queries;
      if (p.has_value() != (bfs >= 0) || (p && p->length != bfs * w.cell_size())) ++mismatches;
      if (p && euclidean_estimate({a, b}, w.cell_size()) > p->length) ++inadmissible;
    }
  }
  report(9, mismatches == 0 && inadmissible == 0, "planner equals BFS; Euclidean admissible",
         fmt("%zu queries on 100 maps, %zu mismatches, %zu inadmissible", queries, mismatches,
             inadmissible),
         since(t0));
}

void criterion10(BoundSuite& suite) {
  const auto t0 = std::chrono::steady_clock::now();
  GeneratorConfig cfg;
  cfg.robots = {2, 3};
  cfg.max_entries = 12;
  std::size_t agree = 0, total = 0;
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    auto d = generate_instance(seed, cfg);
    // Every schedule runs each task in full, so no makespan is below max d_i.
    double longest = 0.0;
    for (const auto& t : d.network.tasks) longest = std::max(longest, t.duration);
    d.time_budget = 0.5 * longest;
    ++total;
    const auto r = qitags_solve(d);
    const auto o = brute_force_optimal(d);
    if (!r.feasible() && !o.feasible()) ++agree;
    if (r.feasible()) check_solution(suite, d, *r.solution, "infeasible-by-construction");
  }
  report(10, agree == total, "search and oracle both signal infeasibility",
         fmt("%zu/%zu agree", agree, total), since(t0));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  auto suite = run_bound_suite();
  const double suite_seconds = since(t0);

  report(1, suite.apriori_violations == 0 && suite.instances >= 50,
         "a-priori bound holds for alpha in 0..0.4",
         fmt("%zu violations over %zu runs on %zu instances%s%s", suite.apriori_violations,
             suite.runs, suite.instances, suite.first_problem.empty() ? "" : "; first: ",
             suite.first_problem.c_str()),
         suite_seconds);
  report(2, suite.posthoc_violations == 0 && suite.posthoc_above_apriori == 0,
         "post-hoc bound holds and never exceeds a-priori",
         fmt("%zu gap violations, %zu post-hoc > a-priori", suite.posthoc_violations,
             suite.posthoc_above_apriori),
         0.0);
  report(3, suite.extremes_ok >= kExtremeShare * suite.instances,
         "alpha=0 best and alpha=1 worst quality in >=95% of instances",
         fmt("%zu/%zu instances (%.1f%%)", suite.extremes_ok, suite.instances,
             100.0 * suite.extremes_ok / suite.instances),
         0.0);

  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(suite);

  report(4, suite.invalid == 0 && suite.infeasible_disagreements == 0,
         "every returned solution validates within budget",
         fmt("%zu/%zu valid, %zu feasibility disagreements", suite.solutions - suite.invalid,
             suite.solutions, suite.infeasible_disagreements),
         0.0);

  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& l : lines) {
    std::printf("%s\n", l.text.c_str());
    failures += !l.ok;
  }
  std::printf("%d of %zu criteria failed; total %.1fs\n", failures, lines.size(), since(t0));
  return failures == 0 ? 0 : 1;
}
