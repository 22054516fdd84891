#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trifuse/errors.hpp"
#include "trifuse/rng.hpp"

namespace trifuse {

struct GmmConfig {
  int components = 5;
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative mean-log-likelihood improvement
  double covariance_floor = 1e-6;
  std::uint64_t seed = 2;
};

inline void validate(const GmmConfig& cfg) {
  if (cfg.components < 1) throw ConfigError("gmm components must be >= 1");
  if (cfg.max_iterations < 1) throw ConfigError("gmm max iterations must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("gmm tolerance must be positive");
  if (!(cfg.covariance_floor > 0.0)) {
    throw ConfigError("gmm covariance floor must be positive");
  }
}

/// Diagonal-covariance Gaussian mixture. Weights form a simplex; every
/// per-dimension variance is at or above the configured floor.
struct GmmModel {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;
  // Mean per-sample log-likelihood at the start of each EM iteration.
  // Training record only; not serialized.
  std::vector<double> log_likelihood_history;

  int component_count() const { return static_cast<int>(weights.size()); }
  int dimension() const {
    return means.empty() ? 0 : static_cast<int>(means.front().size());
  }
};

namespace detail {

constexpr double kLogTwoPi = 1.8378770664093454836;

inline double log_sum_exp(std::span<const double> values) {
  double m = -std::numeric_limits<double>::infinity();
  for (const double v : values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (const double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

inline double diag_gaussian_log_density(std::span<const double> mean,
                                        std::span<const double> variance,
                                        std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double diff = x[d] - mean[d];
    acc += kLogTwoPi + std::log(variance[d]) + diff * diff / variance[d];
  }
  return -0.5 * acc;
}

struct EmStepResult {
  double mean_log_likelihood = 0.0;     // under the parameters entering the step
  std::vector<int> reseeded_components;  // components revived this step
};

// One EM iteration in place. Components left with (near-)zero total
// responsibility are re-seeded deterministically from the sample with the
// lowest likelihood under the current model; weights are renormalized so the
// simplex invariant holds exactly up to rounding.
inline EmStepResult gmm_em_step(GmmModel& model,
                                std::span<const std::vector<double>> data,
                                std::span<const double> global_variance,
                                double covariance_floor) {
  const std::size_t n = data.size();
  const std::size_t k = model.weights.size();
  const std::size_t dim = model.means.front().size();

  std::vector<double> responsibilities(n * k);
  std::vector<double> sample_ll(n);
  std::vector<double> log_weighted(k);

  double total_ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      log_weighted[j] = std::log(model.weights[j]) +
                        diag_gaussian_log_density(model.means[j],
                                                  model.variances[j], data[i]);
    }
    const double lse = log_sum_exp(log_weighted);
    sample_ll[i] = lse;
    total_ll += lse;
    for (std::size_t j = 0; j < k; ++j) {
      responsibilities[i * k + j] = std::exp(log_weighted[j] - lse);
    }
  }

  EmStepResult result;
  result.mean_log_likelihood = total_ll / static_cast<double>(n);

  std::size_t lowest = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (sample_ll[i] < sample_ll[lowest]) lowest = i;
  }

  for (std::size_t j = 0; j < k; ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += responsibilities[i * k + j];
    if (mass < 1e-12) {
      model.means[j] = data[lowest];
      model.variances[j].assign(global_variance.begin(), global_variance.end());
      model.weights[j] = 1.0 / static_cast<double>(n);
      result.reseeded_components.push_back(static_cast<int>(j));
      continue;
    }
    model.weights[j] = mass / static_cast<double>(n);
    std::vector<double>& mean = model.means[j];
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = responsibilities[i * k + j];
      for (std::size_t d = 0; d < dim; ++d) mean[d] += r * data[i][d];
    }
    for (std::size_t d = 0; d < dim; ++d) mean[d] /= mass;
    std::vector<double>& variance = model.variances[j];
    std::fill(variance.begin(), variance.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = responsibilities[i * k + j];
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = data[i][d] - mean[d];
        variance[d] += r * diff * diff;
      }
    }
    for (std::size_t d = 0; d < dim; ++d) {
      variance[d] = std::max(variance[d] / mass, covariance_floor);
    }
  }

  double weight_sum = 0.0;
  for (const double w : model.weights) weight_sum += w;
  for (double& w : model.weights) w /= weight_sum;

  return result;
}

}  // namespace detail

/// log( sum_j w_j * N(x; mu_j, diag(sigma_j^2)) ), computed through a
/// numerically stable log-sum-exp.
inline double gmm_log_likelihood(const GmmModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dimension()) {
    throw DataError("gmm_log_likelihood: feature width mismatch: expected " +
                    std::to_string(model.dimension()) + ", got " +
                    std::to_string(x.size()));
  }
  std::vector<double> log_weighted(model.weights.size());
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    log_weighted[j] =
        std::log(model.weights[j]) +
        detail::diag_gaussian_log_density(model.means[j], model.variances[j], x);
  }
  return detail::log_sum_exp(log_weighted);
}

/// EM fit with k-means++ style seeding, deterministic for a given seed.
/// Stops when the relative improvement of the mean log-likelihood falls
/// below the tolerance, or after max_iterations. The recorded history never
/// decreases beyond rounding noise unless a component had to be re-seeded.
inline GmmModel fit_gmm(std::span<const std::vector<double>> features,
                        const GmmConfig& cfg) {
  validate(cfg);
  const std::size_t n = features.size();
  if (n == 0) throw NumericError("fit_gmm: empty feature list");
  const std::size_t dim = features.front().size();
  if (dim == 0) throw DataError("fit_gmm: zero-width features");
  for (const auto& f : features) {
    if (f.size() != dim) throw DataError("fit_gmm: inconsistent feature widths");
  }
  const std::size_t k = static_cast<std::size_t>(cfg.components);
  if (k > n) {
    throw NumericError("fit_gmm: more components (" + std::to_string(k) +
                       ") than samples (" + std::to_string(n) + ")");
  }

  std::vector<double> global_mean(dim, 0.0);
  for (const auto& f : features) {
    for (std::size_t d = 0; d < dim; ++d) global_mean[d] += f[d];
  }
  for (double& v : global_mean) v /= static_cast<double>(n);
  std::vector<double> global_variance(dim, 0.0);
  for (const auto& f : features) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = f[d] - global_mean[d];
      global_variance[d] += diff * diff;
    }
  }
  for (double& v : global_variance) {
    v = std::max(v / static_cast<double>(n), cfg.covariance_floor);
  }

  // k-means++ seeding: subsequent centers drawn with probability
  // proportional to the squared distance to the nearest chosen center.
  Rng rng(cfg.seed);
  std::vector<std::size_t> centers;
  centers.reserve(k);
  centers.push_back(static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
  std::vector<double> nearest_sq(n);
  auto sq_dist = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = features[a][d] - features[b][d];
      acc += diff * diff;
    }
    return acc;
  };
  for (std::size_t i = 0; i < n; ++i) nearest_sq[i] = sq_dist(i, centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (const double d2 : nearest_sq) total += d2;
    std::size_t next;
    if (total <= 0.0) {
      next = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      next = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest_sq[i];
        if (acc >= target) {
          next = i;
          break;
        }
      }
    }
    centers.push_back(next);
    for (std::size_t i = 0; i < n; ++i) {
      nearest_sq[i] = std::min(nearest_sq[i], sq_dist(i, next));
    }
  }

  GmmModel model;
  model.weights.assign(k, 1.0 / static_cast<double>(k));
  model.means.reserve(k);
  model.variances.reserve(k);
  for (const std::size_t c : centers) {
    model.means.push_back(features[c]);
    model.variances.push_back(global_variance);
  }

  bool reseeded_last = false;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const auto step = detail::gmm_em_step(model, features, global_variance,
                                          cfg.covariance_floor);
    model.log_likelihood_history.push_back(step.mean_log_likelihood);
    const std::size_t h = model.log_likelihood_history.size();
    if (h >= 2 && !reseeded_last) {
      const double previous = model.log_likelihood_history[h - 2];
      const double improvement = step.mean_log_likelihood - previous;
      if (improvement <= cfg.tolerance * (std::abs(previous) + 1e-12)) {
        break;
      }
    }
    reseeded_last = !step.reseeded_components.empty();
  }
  return model;
}

}  // namespace trifuse
