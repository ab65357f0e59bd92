#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qitags/io.hpp"

namespace fs = std::filesystem;
using namespace qitags;

namespace {

constexpr int kExitSolution = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

fs::path output_path(const std::string& dir, const char* name) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(p);
  return p / name;
}

int run_solve(const std::string& instance, std::optional<double> alpha, const std::string& out_dir,
              bool with_oracle) {
  const auto d = io::load_instance(instance);
  SearchOptions opts;
  opts.alpha = alpha;
  auto result = qitags_solve(d, opts);
  std::optional<double> q_opt;
  if (with_oracle && result.feasible()) {
    const auto oracle = brute_force_optimal(d);
    if (oracle.feasible()) q_opt = oracle.best_quality;
  }
  if (result.feasible()) result.solution->bound_report = make_bound_report(result, q_opt);

  auto j = io::solution_to_json(result);
  j["metadata"] = {{"instance", instance},
                   {"alpha", result.alpha},
                   {"alpha_source", alpha ? "flag" : "instance"},
                   {"seed", d.seed ? nlohmann::json(*d.seed) : nlohmann::json(nullptr)}};
  const auto path = output_path(out_dir, "solution.json");
  io::write_file(path, j.dump(2) + "\n");

  if (!result.feasible()) {
    std::printf("infeasible alpha=%s expanded=%zu -> %s\n", io::format_number(result.alpha).c_str(),
                result.stats.nodes_expanded, path.string().c_str());
    return kExitInfeasible;
  }
  const auto& s = *result.solution;
  std::printf("solution alpha=%s quality=%s makespan=%s budget=%s expanded=%zu -> %s\n",
              io::format_number(result.alpha).c_str(), io::format_number(s.total_quality).c_str(),
              io::format_number(s.schedule.makespan).c_str(),
              io::format_number(d.time_budget).c_str(), result.stats.nodes_expanded,
              path.string().c_str());
  return kExitSolution;
}

int run_oracle(const std::string& instance, const std::string& out_dir) {
  const auto d = io::load_instance(instance);
  const auto oracle = brute_force_optimal(d);
  const auto ctx = make_heuristic_context(d, worst_makespan(d));
  const auto path = output_path(out_dir, "oracle.json");
  io::write_file(path, io::oracle_to_json(oracle, ctx).dump(2) + "\n");
  if (!oracle.feasible()) {
    std::printf("no feasible allocation among %zu -> %s\n", oracle.allocations,
                path.string().c_str());
    return kExitInfeasible;
  }
  std::printf("optimal quality=%s makespan=%s scheduled=%zu/%zu -> %s\n",
              io::format_number(oracle.best_quality).c_str(),
              io::format_number(oracle.schedule.makespan).c_str(), oracle.scheduled,
              oracle.allocations, path.string().c_str());
  return kExitSolution;
}

int run_sweep(const std::string& instance, std::vector<double> alphas, const std::string& out_dir) {
  const auto d = io::load_instance(instance);
  if (alphas.empty()) alphas = default_sweep_alphas();
  const auto rows = alpha_sweep(d, alphas);
  const auto path = output_path(out_dir, "sweep.csv");
  io::write_file(path, io::sweep_to_csv(rows));
  std::size_t feasible = 0;
  for (const auto& r : rows) feasible += r.feasible;
  std::printf("%zu alphas, %zu feasible -> %s\n", rows.size(), feasible, path.string().c_str());
  return feasible == 0 ? kExitInfeasible : kExitSolution;
}

int run_learn(const std::string& dataset, std::size_t budget, std::size_t seeds,
              const std::string& strategy, double eval_fraction, std::uint64_t split_seed,
              const std::string& out_dir) {
  const auto data = io::load_dataset(dataset);
  auto [pool_data, eval] = split_dataset(data, eval_fraction, split_seed);
  require(budget <= pool_data.size(), "budget " + std::to_string(budget) +
                                          " exceeds the pool of " +
                                          std::to_string(pool_data.size()));
  const auto hyper = default_hyperparameters(data.dim());
  const Labeler labeler = [&pool_data](std::size_t i, std::span<const double>) {
    return pool_data.labels[i];
  };
  const QueryPool pool(pool_data.features);

  std::ostringstream csv;
  csv << "strategy,seed,step,rmse,env_min,env_mean,env_max\n";
  if (strategy == "entropy" || strategy == "both") {
    const auto run = active_learn(labeler, pool, eval, budget, hyper);
    for (std::size_t k = 0; k < run.rmse_trace.size(); ++k)
      csv << "entropy,," << k + 1 << ',' << io::format_number(run.rmse_trace[k]) << ",,,\n";
    std::printf("entropy final rmse=%s\n", io::format_number(run.rmse_trace.back()).c_str());
  }
  if (strategy == "uniform" || strategy == "both") {
    std::vector<std::vector<double>> traces;
    for (std::uint64_t s = 0; s < seeds; ++s)
      traces.push_back(uniform_baseline(labeler, pool, eval, budget, hyper, s).rmse_trace);
    std::vector<double> lo(budget, kInfinity), hi(budget, -kInfinity), mean(budget, 0.0);
    for (const auto& t : traces)
      for (std::size_t k = 0; k < budget; ++k) {
        lo[k] = std::min(lo[k], t[k]);
        hi[k] = std::max(hi[k], t[k]);
        mean[k] += t[k] / static_cast<double>(traces.size());
      }
    for (std::size_t s = 0; s < traces.size(); ++s)
      for (std::size_t k = 0; k < budget; ++k)
        csv << "uniform," << s << ',' << k + 1 << ',' << io::format_number(traces[s][k]) << ','
            << io::format_number(lo[k]) << ',' << io::format_number(mean[k]) << ','
            << io::format_number(hi[k]) << "\n";
    if (budget > 0)
      std::printf("uniform mean final rmse=%s over %zu seeds\n",
                  io::format_number(mean.back()).c_str(), traces.size());
  }
  const auto path = output_path(out_dir, "learning_curve.csv");
  io::write_file(path, csv.str());
  std::printf("-> %s\n", path.string().c_str());
  return kExitSolution;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality-optimized spatio-temporal task allocation"};
  app.require_subcommand(1);

  std::string instance, out_dir = ".";
  std::optional<double> alpha;
  bool with_oracle = false;
  auto* solve = app.add_subcommand("solve", "Search for an allocation, schedule and motion plan");
  solve->add_option("instance", instance, "Instance JSON")->required();
  solve->add_option("--alpha", alpha, "Override the instance's alpha")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--out-dir", out_dir, "Directory for solution.json");
  solve->add_flag("--oracle", with_oracle, "Also run the brute-force oracle to report the gap");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for small instances");
  oracle->add_option("instance", instance, "Instance JSON")->required();
  oracle->add_option("--out-dir", out_dir, "Directory for oracle.json");

  std::vector<double> alphas;
  auto* sweep = app.add_subcommand("sweep", "Solve across alpha values and compare to the oracle");
  sweep->add_option("instance", instance, "Instance JSON")->required();
  sweep->add_option("--alphas", alphas, "Alpha values (default 0.0..1.0 step 0.1)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--out-dir", out_dir, "Directory for sweep.csv");

  std::string dataset, strategy = "both";
  std::size_t budget = 50, seeds = 20;
  double eval_fraction = 0.2;
  std::uint64_t split_seed = 7;
  auto* learn = app.add_subcommand("learn", "Active learning curve against the uniform baseline");
  learn->add_option("dataset", dataset, "Dataset CSV (traits..., label)")->required();
  learn->add_option("--budget", budget, "Labels to acquire");
  learn->add_option("--seeds", seeds, "Uniform baseline seeds");
  learn->add_option("--strategy", strategy, "entropy, uniform or both")
      ->check(CLI::IsMember({"entropy", "uniform", "both"}));
  learn->add_option("--eval-fraction", eval_fraction, "Held-out evaluation fraction");
  learn->add_option("--split-seed", split_seed, "Seed for the pool/eval split");
  learn->add_option("--out-dir", out_dir, "Directory for learning_curve.csv");

  std::size_t position = 0, samples = kSyntheticSamples;
  std::uint64_t seed = 0;
  std::string out_file;
  auto* synth = app.add_subcommand("synth-dataset", "Write a synthetic weighted-sum dataset");
  synth->add_option("--position", position, "Position index")->check(CLI::Range(0, 5));
  synth->add_option("--seed", seed, "Sampling seed");
  synth->add_option("--samples", samples, "Number of rows");
  synth->add_option("--out", out_file, "Output CSV")->required();

  auto* gen = app.add_subcommand("gen-instance", "Write a seeded random instance");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out_file, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitSolution : kExitError;
  }

  try {
    if (*solve) return run_solve(instance, alpha, out_dir, with_oracle);
    if (*oracle) return run_oracle(instance, out_dir);
    if (*sweep) return run_sweep(instance, alphas, out_dir);
    if (*learn)
      return run_learn(dataset, budget, seeds, strategy, eval_fraction, split_seed, out_dir);
    if (*synth) {
      io::write_file(out_file, io::dataset_to_csv(synthetic_position_dataset(position, seed, samples)));
      return kExitSolution;
    }
    if (*gen) {
      io::save_instance(generate_instance(seed), out_file);
      return kExitSolution;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
