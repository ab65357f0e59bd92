#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qitags/core.hpp"
#include "qitags/gp.hpp"

namespace qitags {

// clamp(w . y / normalizer, 0, 1). Non-negative weights keep it monotone.
struct LinearQualityMap {
  std::vector<double> weights;
  double normalizer = 1.0;

  double operator()(std::span<const double> y) const {
    require(y.size() == weights.size(), "linear quality map dimension mismatch");
    double s = 0.0;
    for (std::size_t u = 0; u < y.size(); ++u) s += weights[u] * y[u];
    return s / normalizer;
  }

  friend bool operator==(const LinearQualityMap&, const LinearQualityMap&) = default;
};

// GP posterior mean used as the quality estimate.
struct LearnedQualityMap {
  std::shared_ptr<const GPModel> model;
  std::string model_path;

  double operator()(std::span<const double> y) const {
    require(model != nullptr, "learned quality map has no model");
    return model->predict(y).mean;
  }

  friend bool operator==(const LearnedQualityMap& a, const LearnedQualityMap& b) {
    if (a.model_path != b.model_path) return false;
    if (!a.model || !b.model) return a.model == b.model;
    return a.model->hyper() == b.model->hyper() && a.model->inputs() == b.model->inputs() &&
           a.model->labels() == b.model->labels();
  }
};

// Arbitrary in-memory map; not serializable.
struct CallableQualityMap {
  std::function<double(std::span<const double>)> fn;
  bool monotone = false;

  double operator()(std::span<const double> y) const { return fn(y); }

  friend bool operator==(const CallableQualityMap&, const CallableQualityMap&) { return false; }
};

class TraitQualityMap {
 public:
  using Variant = std::variant<LinearQualityMap, LearnedQualityMap, CallableQualityMap>;

  TraitQualityMap() = default;
  TraitQualityMap(LinearQualityMap m) : map_(std::move(m)) {
    for (double w : std::get<LinearQualityMap>(map_).weights)
      require(w >= 0.0, "linear quality weights must be non-negative");
    require(std::get<LinearQualityMap>(map_).normalizer > 0.0, "quality normalizer must be positive");
  }
  TraitQualityMap(LearnedQualityMap m) : map_(std::move(m)) {}
  TraitQualityMap(CallableQualityMap m) : map_(std::move(m)) {}

  static TraitQualityMap constant(double value) {
    return CallableQualityMap{[value](std::span<const double>) { return value; }, true};
  }

  // Unclamped value, as learned or as computed.
  double raw(std::span<const double> y) const {
    return std::visit([&](const auto& m) { return m(y); }, map_);
  }

  double operator()(std::span<const double> y) const { return std::clamp(raw(y), 0.0, 1.0); }

  // Known monotone non-decreasing; learned maps are not guaranteed.
  bool monotone() const {
    if (std::holds_alternative<LinearQualityMap>(map_)) return true;
    if (const auto* c = std::get_if<CallableQualityMap>(&map_)) return c->monotone;
    return false;
  }

  const Variant& variant() const { return map_; }

  friend bool operator==(const TraitQualityMap&, const TraitQualityMap&) = default;

 private:
  Variant map_ = LinearQualityMap{};
};

// Lambda(A) = sum_m clamp(lambda_m(y_m / trait_scale)). An empty `trait_scale`
// means no per-trait normalization.
inline double total_allocation_quality(const Allocation& alloc, const Matrix& traits,
                                       const std::vector<TraitQualityMap>& maps,
                                       std::span<const double> trait_scale = {}) {
  require(maps.size() == alloc.tasks(), "need one quality map per task");
  const Matrix y = aggregate_traits(alloc, traits);
  std::vector<double> row(y.cols());
  double total = 0.0;
  for (std::size_t m = 0; m < y.rows(); ++m) {
    for (std::size_t u = 0; u < y.cols(); ++u)
      row[u] = trait_scale.empty() ? y(m, u) : y(m, u) / trait_scale[u];
    total += maps[m](row);
  }
  return total;
}

}  // namespace qitags
