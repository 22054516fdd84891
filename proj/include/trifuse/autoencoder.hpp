#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trifuse/errors.hpp"
#include "trifuse/hmof.hpp"
#include "trifuse/rng.hpp"

namespace trifuse {

enum class Activation { sigmoid, linear };

/// Fully connected reconstruction network. The stack lists every layer width
/// including input and output; the default mirrors a 9-bin histogram through
/// a 4-unit bottleneck. Hidden layers use the configured activation, the
/// output layer is always linear.
struct AutoencoderConfig {
  std::vector<int> layer_widths{9, 4, 9};
  double learning_rate = 1.0;
  int epochs = 600;
  Activation hidden_activation = Activation::sigmoid;
  std::uint64_t seed = 1;
};

inline void validate(const AutoencoderConfig& cfg) {
  const auto& w = cfg.layer_widths;
  if (w.size() < 2) throw ConfigError("autoencoder stack needs at least two layers");
  for (const int width : w) {
    if (width <= 0) throw ConfigError("autoencoder layer widths must be positive");
  }
  for (std::size_t i = 0; i < w.size() / 2; ++i) {
    if (w[i] != w[w.size() - 1 - i]) {
      throw ConfigError("autoencoder stack must be symmetric");
    }
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw ConfigError("autoencoder learning rate must be positive");
  }
  if (cfg.epochs < 0) throw ConfigError("autoencoder epochs must be non-negative");
}

struct AutoencoderModel {
  std::vector<int> layer_widths;
  Activation hidden_activation = Activation::sigmoid;
  // weights[l] is row-major (layer_widths[l+1] x layer_widths[l]).
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  // Loss before the first update, then after each epoch. Not serialized.
  std::vector<double> training_loss;

  int input_width() const { return layer_widths.front(); }
  int output_width() const { return layer_widths.back(); }
  std::size_t layer_count() const { return weights.size(); }
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline void check_input_width(const AutoencoderModel& m, std::size_t width) {
  if (static_cast<int>(width) != m.input_width()) {
    throw DataError("autoencoder input width mismatch: expected " +
                    std::to_string(m.input_width()) + ", got " +
                    std::to_string(width));
  }
}

// Activations per layer, activations[0] == input, back() == output.
inline std::vector<std::vector<double>> ae_forward(const AutoencoderModel& m,
                                                   std::span<const double> input) {
  check_input_width(m, input.size());
  std::vector<std::vector<double>> activations(m.layer_count() + 1);
  activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const int rows = m.layer_widths[l + 1];
    const int cols = m.layer_widths[l];
    const bool is_output = (l + 1 == m.layer_count());
    std::vector<double>& out = activations[l + 1];
    out.assign(static_cast<std::size_t>(rows), 0.0);
    const std::vector<double>& in = activations[l];
    for (int r = 0; r < rows; ++r) {
      double z = m.biases[l][r];
      const double* wrow = &m.weights[l][static_cast<std::size_t>(r) * cols];
      for (int c = 0; c < cols; ++c) z += wrow[c] * in[c];
      out[r] = (!is_output && m.hidden_activation == Activation::sigmoid)
                   ? sigmoid(z)
                   : z;
    }
  }
  return activations;
}

}  // namespace detail

/// Deterministic uniform(-0.5, 0.5) initialization from the config seed;
/// draw order is layer by layer, weights row-major, then biases.
inline AutoencoderModel init_autoencoder(const AutoencoderConfig& cfg) {
  validate(cfg);
  AutoencoderModel m;
  m.layer_widths = cfg.layer_widths;
  m.hidden_activation = cfg.hidden_activation;
  Rng rng(cfg.seed);
  const std::size_t layers = cfg.layer_widths.size() - 1;
  m.weights.resize(layers);
  m.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = static_cast<std::size_t>(cfg.layer_widths[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(cfg.layer_widths[l]);
    m.weights[l].resize(rows * cols);
    for (double& w : m.weights[l]) w = rng.uniform(-0.5, 0.5);
    m.biases[l].resize(rows);
    for (double& b : m.biases[l]) b = rng.uniform(-0.5, 0.5);
  }
  return m;
}

/// Deterministic forward pass; returns the decoder output.
inline std::vector<double> reconstruct(const AutoencoderModel& m,
                                       std::span<const double> input) {
  return detail::ae_forward(m, input).back();
}

/// Activations at the bottleneck (the middle of the symmetric stack).
inline std::vector<double> encode(const AutoencoderModel& m,
                                  std::span<const double> input) {
  if (m.layer_count() % 2 != 0) {
    throw ConfigError("encode requires a symmetric encoder/decoder stack");
  }
  auto activations = detail::ae_forward(m, input);
  return activations[m.layer_count() / 2];
}

/// Mean squared reconstruction error over the feature's dimensions.
inline double reconstruction_mse(const AutoencoderModel& m,
                                 std::span<const double> input) {
  const std::vector<double> output = reconstruct(m, input);
  double acc = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - input[i];
    acc += d * d;
  }
  return acc / static_cast<double>(output.size());
}

/// Training objective: mean over samples of half the squared reconstruction
/// error.
inline double batch_loss(const AutoencoderModel& m,
                         std::span<const HmofFeature> features) {
  if (features.empty()) throw NumericError("batch_loss: empty feature list");
  double acc = 0.0;
  for (const auto& f : features) {
    const std::vector<double> output = reconstruct(m, f.bins);
    double sq = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
      const double d = output[i] - f.bins[i];
      sq += d * d;
    }
    acc += 0.5 * sq;
  }
  return acc / static_cast<double>(features.size());
}

inline std::size_t parameter_count(const AutoencoderModel& m) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    n += m.weights[l].size() + m.biases[l].size();
  }
  return n;
}

/// Flat parameter vector in initialization order (per layer: weights
/// row-major, then biases).
inline std::vector<double> flatten_parameters(const AutoencoderModel& m) {
  std::vector<double> flat;
  flat.reserve(parameter_count(m));
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    flat.insert(flat.end(), m.weights[l].begin(), m.weights[l].end());
    flat.insert(flat.end(), m.biases[l].begin(), m.biases[l].end());
  }
  return flat;
}

inline void set_parameters(AutoencoderModel& m, std::span<const double> flat) {
  if (flat.size() != parameter_count(m)) {
    throw DataError("parameter vector length mismatch");
  }
  std::size_t pos = 0;
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    for (double& w : m.weights[l]) w = flat[pos++];
    for (double& b : m.biases[l]) b = flat[pos++];
  }
}

/// Analytic gradient of batch_loss with respect to the flat parameter
/// vector, via backpropagation. Layout matches flatten_parameters.
inline std::vector<double> loss_gradient(const AutoencoderModel& m,
                                         std::span<const HmofFeature> features) {
  if (features.empty()) throw NumericError("loss_gradient: empty feature list");
  const std::size_t layers = m.layer_count();
  std::vector<std::vector<double>> grad_w(layers);
  std::vector<std::vector<double>> grad_b(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    grad_w[l].assign(m.weights[l].size(), 0.0);
    grad_b[l].assign(m.biases[l].size(), 0.0);
  }

  const double inv_n = 1.0 / static_cast<double>(features.size());
  for (const auto& f : features) {
    const auto activations = detail::ae_forward(m, f.bins);
    // dL/dz at the output layer; the output is linear.
    std::vector<double> delta(activations.back().size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
      delta[i] = (activations.back()[i] - f.bins[i]) * inv_n;
    }
    for (std::size_t l = layers; l-- > 0;) {
      const int rows = m.layer_widths[l + 1];
      const int cols = m.layer_widths[l];
      const std::vector<double>& in = activations[l];
      for (int r = 0; r < rows; ++r) {
        grad_b[l][r] += delta[r];
        double* grow = &grad_w[l][static_cast<std::size_t>(r) * cols];
        for (int c = 0; c < cols; ++c) grow[c] += delta[r] * in[c];
      }
      if (l == 0) break;
      // propagate through W_l and the hidden activation of layer l
      std::vector<double> prev(static_cast<std::size_t>(cols), 0.0);
      for (int r = 0; r < rows; ++r) {
        const double* wrow = &m.weights[l][static_cast<std::size_t>(r) * cols];
        for (int c = 0; c < cols; ++c) prev[c] += wrow[c] * delta[r];
      }
      if (m.hidden_activation == Activation::sigmoid) {
        for (int c = 0; c < cols; ++c) prev[c] *= in[c] * (1.0 - in[c]);
      }
      delta = std::move(prev);
    }
  }

  std::vector<double> flat;
  flat.reserve(parameter_count(m));
  for (std::size_t l = 0; l < layers; ++l) {
    flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
    flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
  }
  return flat;
}

/// Full-batch gradient descent on the mean squared reconstruction error.
/// training_loss records the initial loss and the loss after every epoch;
/// a non-finite loss aborts with the offending epoch in the message.
inline AutoencoderModel train_autoencoder(std::span<const HmofFeature> features,
                                          const AutoencoderConfig& cfg) {
  validate(cfg);
  if (features.empty()) {
    throw DataError("train_autoencoder: empty feature list");
  }
  for (const auto& f : features) {
    if (static_cast<int>(f.bins.size()) != cfg.layer_widths.front()) {
      throw DataError("train_autoencoder: feature width mismatch");
    }
  }

  AutoencoderModel m = init_autoencoder(cfg);
  double loss = batch_loss(m, features);
  if (!std::isfinite(loss)) {
    throw NumericError("autoencoder training: non-finite loss at epoch 0");
  }
  m.training_loss.push_back(loss);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<double> grad = loss_gradient(m, features);
    std::size_t pos = 0;
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
      for (double& w : m.weights[l]) w -= cfg.learning_rate * grad[pos++];
      for (double& b : m.biases[l]) b -= cfg.learning_rate * grad[pos++];
    }
    loss = batch_loss(m, features);
    if (!std::isfinite(loss)) {
      throw NumericError("autoencoder training diverged: non-finite loss at epoch " +
                         std::to_string(epoch));
    }
    m.training_loss.push_back(loss);
  }
  return m;
}

}  // namespace trifuse
