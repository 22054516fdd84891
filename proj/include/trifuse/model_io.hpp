#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trifuse/autoencoder.hpp"
#include "trifuse/binary_io.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/gmm.hpp"

namespace trifuse {

// Versioned little-endian model formats. Parameters travel as raw 64-bit
// floats (row-major), so a save/load round trip is bit-identical.

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// "TFAE": version, layer count, widths, activation code, then per layer the
/// weight matrix (row-major) and bias vector.
inline void save_autoencoder(const AutoencoderModel& model,
                             const std::filesystem::path& path) {
  detail::ByteWriter out(path);
  out.magic("TFAE");
  out.u32(kModelFormatVersion);
  out.u32(static_cast<std::uint32_t>(model.layer_widths.size()));
  for (const int w : model.layer_widths) out.u32(static_cast<std::uint32_t>(w));
  out.u32(model.hidden_activation == Activation::sigmoid ? 0u : 1u);
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    for (const double w : model.weights[l]) out.f64(w);
    for (const double b : model.biases[l]) out.f64(b);
  }
  out.finish();
}

inline AutoencoderModel load_autoencoder(const std::filesystem::path& path) {
  detail::ByteReader in(path);
  in.expect_magic("TFAE");
  const std::uint32_t version = in.u32();
  if (version != kModelFormatVersion) {
    throw DataError(in.path() + ": unsupported TFAE version " +
                    std::to_string(version));
  }
  const std::uint32_t stack = in.u32();
  if (stack < 2 || stack > 64) {
    throw DataError(in.path() + ": implausible layer count " +
                    std::to_string(stack));
  }
  AutoencoderModel model;
  model.layer_widths.resize(stack);
  for (auto& w : model.layer_widths) {
    w = static_cast<int>(in.u32());
    if (w <= 0 || w > 1 << 20) {
      throw DataError(in.path() + ": implausible layer width");
    }
  }
  const std::uint32_t activation = in.u32();
  if (activation > 1) {
    throw DataError(in.path() + ": unknown activation code " +
                    std::to_string(activation));
  }
  model.hidden_activation = activation == 0 ? Activation::sigmoid : Activation::linear;
  model.weights.resize(stack - 1);
  model.biases.resize(stack - 1);
  for (std::size_t l = 0; l + 1 < stack; ++l) {
    const std::size_t rows = static_cast<std::size_t>(model.layer_widths[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(model.layer_widths[l]);
    model.weights[l].resize(rows * cols);
    for (auto& w : model.weights[l]) w = in.f64();
    model.biases[l].resize(rows);
    for (auto& b : model.biases[l]) b = in.f64();
  }
  in.expect_eof();
  return model;
}

/// "TFGM": version, component count, dimension, then weights, means and
/// diagonal variances.
inline void save_gmm(const GmmModel& model, const std::filesystem::path& path) {
  detail::ByteWriter out(path);
  out.magic("TFGM");
  out.u32(kModelFormatVersion);
  out.u32(static_cast<std::uint32_t>(model.component_count()));
  out.u32(static_cast<std::uint32_t>(model.dimension()));
  for (const double w : model.weights) out.f64(w);
  for (const auto& mean : model.means) {
    for (const double v : mean) out.f64(v);
  }
  for (const auto& variance : model.variances) {
    for (const double v : variance) out.f64(v);
  }
  out.finish();
}

inline GmmModel load_gmm(const std::filesystem::path& path) {
  detail::ByteReader in(path);
  in.expect_magic("TFGM");
  const std::uint32_t version = in.u32();
  if (version != kModelFormatVersion) {
    throw DataError(in.path() + ": unsupported TFGM version " +
                    std::to_string(version));
  }
  const std::uint32_t k = in.u32();
  const std::uint32_t dim = in.u32();
  if (k == 0 || k > 1 << 16 || dim == 0 || dim > 1 << 20) {
    throw DataError(in.path() + ": implausible mixture shape");
  }
  GmmModel model;
  model.weights.resize(k);
  for (auto& w : model.weights) w = in.f64();
  model.means.assign(k, std::vector<double>(dim));
  for (auto& mean : model.means) {
    for (auto& v : mean) v = in.f64();
  }
  model.variances.assign(k, std::vector<double>(dim));
  for (auto& variance : model.variances) {
    for (auto& v : variance) v = in.f64();
  }
  in.expect_eof();
  return model;
}

}  // namespace trifuse
