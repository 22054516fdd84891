#pragma once

#include <span>
#include <string>
#include <vector>

#include "trifuse/autoencoder.hpp"
#include "trifuse/core.hpp"
#include "trifuse/gmm.hpp"
#include "trifuse/hmof.hpp"

namespace trifuse {

/// What the mixture model consumes: the autoencoder's reconstruction of the
/// histogram (default), the raw histogram, or the bottleneck code.
enum class MotionFeatureMode { reconstructed, raw, latent };

inline std::string to_string(MotionFeatureMode mode) {
  switch (mode) {
    case MotionFeatureMode::reconstructed: return "reconstructed";
    case MotionFeatureMode::raw: return "raw";
    case MotionFeatureMode::latent: return "latent";
  }
  return "reconstructed";
}

inline MotionFeatureMode parse_motion_feature_mode(const std::string& text) {
  if (text == "reconstructed") return MotionFeatureMode::reconstructed;
  if (text == "raw") return MotionFeatureMode::raw;
  if (text == "latent") return MotionFeatureMode::latent;
  throw ConfigError("unknown motion feature mode '" + text +
                    "' (expected reconstructed, raw, or latent)");
}

inline std::vector<double> motion_feature(const AutoencoderModel& model,
                                          const HmofFeature& feature,
                                          MotionFeatureMode mode) {
  switch (mode) {
    case MotionFeatureMode::raw: return feature.bins;
    case MotionFeatureMode::latent: return encode(model, feature.bins);
    case MotionFeatureMode::reconstructed: break;
  }
  return reconstruct(model, feature.bins);
}

/// One motion observation ready for classification.
struct MotionEntry {
  std::string target_id;
  int frame_index = 0;
  std::vector<double> feature;
};

/// Raw motion score is the mixture log-likelihood; normalization is
/// inverted over the whole batch, so the least likely feature scores 1.
inline std::vector<ScoredTarget> score_motion_batch(
    std::span<const MotionEntry> entries, const GmmModel& model) {
  std::vector<double> raw(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    raw[i] = gmm_log_likelihood(model, entries[i].feature);
  }
  const std::vector<double> normalized = min_max_invert_normalize(raw);
  std::vector<ScoredTarget> out(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out[i] = {entries[i].target_id, entries[i].frame_index, raw[i],
              normalized[i]};
  }
  return out;
}

}  // namespace trifuse
