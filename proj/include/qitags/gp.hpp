#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "qitags/errors.hpp"

namespace qitags {

struct GPHyperparameters {
  double signal_var = 0.25;
  double length_scale = 1.0;
  double noise_var = 1e-4;

  friend bool operator==(const GPHyperparameters&, const GPHyperparameters&) = default;
};

// Defaults: signal variance 0.25, length scale sqrt(U), noise 1e-4.
inline GPHyperparameters default_hyperparameters(std::size_t trait_dim) {
  return {0.25, std::sqrt(static_cast<double>(std::max<std::size_t>(trait_dim, 1))), 1e-4};
}

inline constexpr double kNoiseFloor = 1e-8;
inline constexpr double kPriorMean = 0.5;

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "kernel inputs differ in dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// sigma_f^2 * exp(-|a-b|^2 / (2 l^2))
inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double signal_var,
                         double length_scale) {
  return signal_var * std::exp(-squared_distance(a, b) / (2.0 * length_scale * length_scale));
}

struct GPPrediction {
  double mean = kPriorMean;
  double variance = 0.0;
};

// Exact GP regression with an RBF kernel and constant prior mean 0.5.
// Immutable once fitted; the Cholesky factor of (K + noise I) is cached.
class GPModel {
 public:
  GPModel() = default;

  // Model with no data: predictions are the prior.
  static GPModel prior(std::size_t dim, GPHyperparameters hyper) {
    GPModel g;
    g.dim_ = dim;
    g.hyper_ = sanitize(hyper);
    return g;
  }

  static GPModel fit(std::vector<std::vector<double>> inputs, std::vector<double> labels,
                     GPHyperparameters hyper) {
    require(!inputs.empty(), "GP fit needs at least one sample");
    require(inputs.size() == labels.size(), "GP inputs and labels differ in length");
    GPModel g;
    g.dim_ = inputs.front().size();
    for (const auto& x : inputs) require(x.size() == g.dim_, "GP inputs differ in dimension");
    g.hyper_ = sanitize(hyper);
    g.inputs_ = std::move(inputs);
    g.labels_ = std::move(labels);

    const auto n = static_cast<Eigen::Index>(g.inputs_.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        k(i, j) = k(j, i) = g.kernel(g.inputs_[i], g.inputs_[j]);
    k.diagonal().array() += g.hyper_.noise_var;

    g.chol_.compute(k);
    if (g.chol_.info() != Eigen::Success)
      throw NumericalError("GP covariance is not positive definite (n=" + std::to_string(n) +
                           ", noise=" + std::to_string(g.hyper_.noise_var) + ")");
    Eigen::VectorXd centered(n);
    for (Eigen::Index i = 0; i < n; ++i) centered(i) = g.labels_[i] - kPriorMean;
    g.weights_ = g.chol_.solve(centered);
    g.centered_ = std::move(centered);
    return g;
  }

  GPPrediction predict(std::span<const double> y) const {
    require(y.size() == dim_, "GP query dimension mismatch");
    if (inputs_.empty()) return {kPriorMean, hyper_.signal_var};
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) kstar(i) = kernel(inputs_[i], y);
    const double mean = kPriorMean + kstar.dot(weights_);
    const Eigen::VectorXd v = chol_.matrixL().solve(kstar);
    double var = hyper_.signal_var - v.squaredNorm();
    if (var < 0.0) {
      if (var < -1e-10) throw NumericalError("GP posterior variance is negative beyond round-off");
      var = 0.0;
    }
    return {mean, var};
  }

  double log_marginal_likelihood() const {
    if (inputs_.empty()) return 0.0;
    const auto n = static_cast<double>(inputs_.size());
    const auto& l = chol_.matrixL();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(inputs_.size()); ++i)
      logdet += std::log(l(i, i));
    return -0.5 * centered_.dot(weights_) - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return inputs_.size(); }
  const GPHyperparameters& hyper() const { return hyper_; }
  const std::vector<std::vector<double>>& inputs() const { return inputs_; }
  const std::vector<double>& labels() const { return labels_; }

 private:
  static GPHyperparameters sanitize(GPHyperparameters h) {
    require(h.signal_var > 0.0, "GP signal variance must be positive");
    require(h.length_scale > 0.0, "GP length scale must be positive");
    require(h.noise_var >= 0.0, "GP noise variance must be non-negative");
    h.noise_var = std::max(h.noise_var, kNoiseFloor);
    return h;
  }

  double kernel(std::span<const double> a, std::span<const double> b) const {
    return rbf_kernel(a, b, hyper_.signal_var, hyper_.length_scale);
  }

  std::size_t dim_ = 0;
  GPHyperparameters hyper_;
  std::vector<std::vector<double>> inputs_;
  std::vector<double> labels_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd centered_;
};

inline GPModel gp_fit(std::vector<std::vector<double>> inputs, std::vector<double> labels,
                      GPHyperparameters hyper) {
  for (double q : labels) require(q >= 0.0 && q <= 1.0, "GP labels must lie in [0,1]");
  return GPModel::fit(std::move(inputs), std::move(labels), hyper);
}

inline GPPrediction gp_predict(const GPModel& model, std::span<const double> y) {
  return model.predict(y);
}

// Coarse grid over (signal_var, length_scale) scaled around `base`,
// keeping the noise fixed; returns the maximum-likelihood pair.
inline GPHyperparameters select_hyperparameters(const std::vector<std::vector<double>>& inputs,
                                                const std::vector<double>& labels,
                                                GPHyperparameters base) {
  static constexpr double kScales[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  GPHyperparameters best = base;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (double sv : kScales)
    for (double ls : kScales) {
      GPHyperparameters h{base.signal_var * sv, base.length_scale * ls, base.noise_var};
      const double lml = GPModel::fit(inputs, labels, h).log_marginal_likelihood();
      if (lml > best_lml) {
        best_lml = lml;
        best = h;
      }
    }
  return best;
}

}  // namespace qitags
