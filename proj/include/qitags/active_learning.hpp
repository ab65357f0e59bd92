#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qitags/gp.hpp"

namespace qitags {

struct Dataset {
  std::vector<std::string> trait_names;
  std::vector<std::vector<double>> features;
  std::vector<double> labels;

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? trait_names.size() : features.front().size(); }
};

struct QueryPool {
  std::vector<std::vector<double>> candidates;
  std::vector<bool> labeled;

  explicit QueryPool(std::vector<std::vector<double>> c = {})
      : candidates(std::move(c)), labeled(candidates.size(), false) {}

  std::size_t unlabeled() const {
    return static_cast<std::size_t>(std::count(labeled.begin(), labeled.end(), false));
  }
};

// Unlabeled candidate with the largest posterior variance; smallest index
// wins ties.
inline std::size_t select_query(const GPModel& model, const QueryPool& pool) {
  require(pool.unlabeled() > 0, "query pool has no unlabeled candidates");
  std::size_t best = pool.candidates.size();
  double best_var = -1.0;
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
    if (pool.labeled[i]) continue;
    const double v = model.predict(pool.candidates[i]).variance;
    if (v > best_var) {
      best_var = v;
      best = i;
    }
  }
  return best;
}

// Root mean squared error of the clamped posterior mean.
inline double rmse(const GPModel& model, const Dataset& eval) {
  require(eval.size() > 0, "evaluation set is empty");
  double s = 0.0;
  for (std::size_t i = 0; i < eval.size(); ++i) {
    const double p = std::clamp(model.predict(eval.features[i]).mean, 0.0, 1.0);
    s += (p - eval.labels[i]) * (p - eval.labels[i]);
  }
  return std::sqrt(s / static_cast<double>(eval.size()));
}

// Returns the quality label for pool candidate `index`.
using Labeler = std::function<double(std::size_t index, std::span<const double> traits)>;

struct LearningRun {
  GPModel model;
  std::vector<double> rmse_trace;     // entry k: error after k + 1 labels
  std::vector<std::size_t> queried;   // pool indices in labeling order
  std::optional<std::string> aborted; // labeler failure message
};

namespace detail {

template <class Selector>
LearningRun learn_loop(const Labeler& oracle, QueryPool pool, const Dataset& eval,
                       std::size_t budget, const GPHyperparameters& hyper, Selector&& select) {
  require(budget <= pool.unlabeled(), "budget exceeds the unlabeled pool");
  LearningRun run;
  const std::size_t dim = pool.candidates.empty() ? eval.dim() : pool.candidates.front().size();
  run.model = GPModel::prior(dim, hyper);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (std::size_t step = 0; step < budget; ++step) {
    const std::size_t idx = select(run.model, pool, step);
    double label = 0.0;
    try {
      label = oracle(idx, pool.candidates[idx]);
    } catch (const std::exception& e) {
      run.aborted = e.what();
      return run;
    }
    pool.labeled[idx] = true;
    xs.push_back(pool.candidates[idx]);
    ys.push_back(label);
    run.queried.push_back(idx);
    run.model = gp_fit(xs, ys, hyper);
    run.rmse_trace.push_back(rmse(run.model, eval));
  }
  return run;
}

}  // namespace detail

// Max-entropy active learning: select, label, refit, record RMSE.
inline LearningRun active_learn(const Labeler& oracle, QueryPool pool, const Dataset& eval,
                                std::size_t budget, const GPHyperparameters& hyper) {
  return detail::learn_loop(oracle, std::move(pool), eval, budget, hyper,
                            [](const GPModel& m, const QueryPool& p, std::size_t) {
                              return select_query(m, p);
                            });
}

// Uniform sampling without replacement, fixed by `seed`.
inline LearningRun uniform_baseline(const Labeler& oracle, QueryPool pool, const Dataset& eval,
                                    std::size_t budget, const GPHyperparameters& hyper,
                                    std::uint64_t seed) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pool.candidates.size(); ++i)
    if (!pool.labeled[i]) order.push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return detail::learn_loop(oracle, std::move(pool), eval, budget, hyper,
                            [&order](const GPModel&, const QueryPool&, std::size_t step) {
                              return order[step];
                            });
}

// Pool / evaluation split by seeded shuffle; eval gets round(fraction * n).
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double eval_fraction,
                                                 std::uint64_t seed) {
  require(eval_fraction > 0.0 && eval_fraction < 1.0, "eval fraction must lie in (0,1)");
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_eval = static_cast<std::size_t>(std::lround(eval_fraction * data.size()));
  require(n_eval > 0 && n_eval < data.size(), "split leaves an empty side");
  Dataset pool{data.trait_names, {}, {}};
  Dataset eval{data.trait_names, {}, {}};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Dataset& dst = k < n_eval ? eval : pool;
    dst.features.push_back(data.features[idx[k]]);
    dst.labels.push_back(data.labels[idx[k]]);
  }
  return {std::move(pool), std::move(eval)};
}

inline constexpr std::size_t kSyntheticTraits = 53;
inline constexpr std::size_t kSyntheticPositions = 6;
inline constexpr std::size_t kSyntheticSamples = 500;

// Per-position rating weights: a handful of dominant traits plus a small
// contribution from the rest, normalized to sum to one.
inline std::vector<double> synthetic_position_weights(std::size_t position,
                                                      std::size_t traits = kSyntheticTraits) {
  std::mt19937_64 rng(0x5eed0000ULL + position);
  std::uniform_real_distribution<double> minor(0.0, 0.2);
  std::uniform_real_distribution<double> major(1.0, 3.0);
  std::vector<double> w(traits);
  for (auto& x : w) x = minor(rng);
  std::vector<std::size_t> idx(traits);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t k = 0; k < std::min<std::size_t>(8, traits); ++k) w[idx[k]] = major(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

// Players with uniform [0,1] traits rated by a clamped weighted sum.
inline Dataset synthetic_position_dataset(std::size_t position, std::uint64_t seed,
                                          std::size_t samples = kSyntheticSamples,
                                          std::size_t traits = kSyntheticTraits) {
  const auto w = synthetic_position_weights(position, traits);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset d;
  for (std::size_t u = 0; u < traits; ++u) d.trait_names.push_back("trait_" + std::to_string(u));
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(traits);
    double q = 0.0;
    for (std::size_t u = 0; u < traits; ++u) {
      x[u] = unit(rng);
      q += w[u] * x[u];
    }
    d.features.push_back(std::move(x));
    d.labels.push_back(std::clamp(q, 0.0, 1.0));
  }
  return d;
}

}  // namespace qitags
