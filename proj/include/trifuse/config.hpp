#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trifuse/autoencoder.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/format.hpp"
#include "trifuse/fusion.hpp"
#include "trifuse/gmm.hpp"
#include "trifuse/hmof.hpp"
#include "trifuse/motion_branch.hpp"
#include "trifuse/object_branch.hpp"
#include "trifuse/rng.hpp"
#include "trifuse/synthetic.hpp"

namespace trifuse {

inline std::string to_string(Activation a) {
  return a == Activation::sigmoid ? "sigmoid" : "linear";
}

inline Activation parse_activation(const std::string& text) {
  if (text == "sigmoid") return Activation::sigmoid;
  if (text == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + text +
                    "' (expected sigmoid or linear)");
}

/// Everything a pipeline run needs. The autoencoder stack is derived from
/// the histogram width and the hidden widths by finalize(), and the training
/// stages receive seeds derived from the master seed.
struct PipelineConfig {
  double object_confidence_threshold = 0.95;
  double action_confidence_threshold = 0.99;
  int segment_length = 5;
  std::uint64_t seed = 0;
  HmofConfig hmof;
  std::vector<int> autoencoder_hidden_widths{4};
  AutoencoderConfig autoencoder;
  GmmConfig gmm;
  MotionFeatureMode motion_feature_mode = MotionFeatureMode::reconstructed;
  FusionConfig fusion;
  double motion_flag_threshold = 0.5;
};

/// Derives the dependent fields and validates the whole configuration.
/// Call after presets and config-file overrides have been applied.
inline void finalize(PipelineConfig& cfg) {
  detail::check_confidence_threshold(cfg.object_confidence_threshold,
                                     "object confidence threshold");
  detail::check_confidence_threshold(cfg.action_confidence_threshold,
                                     "action confidence threshold");
  if (cfg.segment_length < 1) {
    throw ConfigError("tracking segment length must be >= 1");
  }
  if (!(cfg.motion_flag_threshold >= 0.0 && cfg.motion_flag_threshold <= 1.0)) {
    throw ConfigError("motion flag threshold must lie in [0,1]");
  }
  validate(cfg.hmof);
  validate(cfg.gmm);
  validate(cfg.fusion);
  if (cfg.autoencoder_hidden_widths.empty()) {
    throw ConfigError("autoencoder needs at least one hidden width");
  }

  cfg.autoencoder.layer_widths.clear();
  cfg.autoencoder.layer_widths.push_back(cfg.hmof.bins + 1);
  for (const int w : cfg.autoencoder_hidden_widths) {
    cfg.autoencoder.layer_widths.push_back(w);
  }
  cfg.autoencoder.layer_widths.push_back(cfg.hmof.bins + 1);

  cfg.autoencoder.seed = splitmix64(cfg.seed ^ 0x7472666165ULL);
  cfg.gmm.seed = splitmix64(cfg.seed ^ 0x747266676dULL);
  validate(cfg.autoencoder);
}

/// Crowd-scene preset: histogram cap 1.8 over 8 cells, 5-frame tracking,
/// fusion weights 1 / 1.5 / 1.5.
inline PipelineConfig preset_umn() {
  PipelineConfig cfg;
  cfg.object_confidence_threshold = 0.95;
  cfg.action_confidence_threshold = 0.99;
  cfg.segment_length = 5;
  cfg.hmof = HmofConfig{8, 1.8};
  cfg.fusion.object_weight = 1.0;
  cfg.fusion.action_weight = 1.5;
  cfg.fusion.motion_weight = 1.5;
  return cfg;
}

/// Walkway-scene preset: histogram cap 2.4, uniform fusion weights.
inline PipelineConfig preset_ped2() {
  PipelineConfig cfg;
  cfg.object_confidence_threshold = 0.95;
  cfg.action_confidence_threshold = 0.99;
  cfg.segment_length = 5;
  cfg.hmof = HmofConfig{8, 2.4};
  cfg.fusion.object_weight = 1.0;
  cfg.fusion.action_weight = 1.0;
  cfg.fusion.motion_weight = 1.0;
  return cfg;
}

inline PipelineConfig preset_by_name(const std::string& name) {
  if (name == "umn") return preset_umn();
  if (name == "ped2") return preset_ped2();
  throw ConfigError("unknown preset '" + name + "' (expected umn or ped2)");
}

/// Pipeline settings plus the synthetic-scene settings used by `gen`.
struct FullConfig {
  PipelineConfig pipeline;
  SyntheticSceneConfig scene;
};

namespace detail {

inline double config_double(const std::string& value, const std::string& where) {
  try {
    return parse_double(value, where);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

inline long long config_int(const std::string& value, const std::string& where) {
  try {
    return parse_int(value, where);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

inline std::uint64_t config_uint(const std::string& value,
                                 const std::string& where) {
  try {
    return static_cast<std::uint64_t>(parse_uint(value, where));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

inline std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const std::string item = trim(
        comma == std::string::npos ? value.substr(start)
                                   : value.substr(start, comma - start));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

}  // namespace detail

/// Applies one `key = value` file on top of the given configuration.
/// Unknown keys are hard errors so hyperparameter typos cannot silently
/// fall back to defaults.
inline void apply_config_file(FullConfig& cfg, const std::filesystem::path& path) {
  for (const auto& entry : detail::read_key_value_file(path)) {
    const std::string where =
        path.string() + " line " + std::to_string(entry.line_number);
    const std::string& key = entry.key;
    const std::string& value = entry.value;
    PipelineConfig& p = cfg.pipeline;
    SyntheticSceneConfig& s = cfg.scene;

    if (key == "pipeline.seed") {
      p.seed = detail::config_uint(value, where);
    } else if (key == "object.confidence_threshold") {
      p.object_confidence_threshold = detail::config_double(value, where);
    } else if (key == "action.confidence_threshold") {
      p.action_confidence_threshold = detail::config_double(value, where);
    } else if (key == "tracking.segment_length") {
      p.segment_length = static_cast<int>(detail::config_int(value, where));
    } else if (key == "hmof.bins") {
      p.hmof.bins = static_cast<int>(detail::config_int(value, where));
    } else if (key == "hmof.magnitude_cap") {
      p.hmof.magnitude_cap = detail::config_double(value, where);
    } else if (key == "autoencoder.hidden_widths") {
      p.autoencoder_hidden_widths.clear();
      for (const auto& item : detail::split_commas(value)) {
        p.autoencoder_hidden_widths.push_back(
            static_cast<int>(detail::config_int(item, where)));
      }
    } else if (key == "autoencoder.learning_rate") {
      p.autoencoder.learning_rate = detail::config_double(value, where);
    } else if (key == "autoencoder.epochs") {
      p.autoencoder.epochs = static_cast<int>(detail::config_int(value, where));
    } else if (key == "autoencoder.activation") {
      p.autoencoder.hidden_activation = parse_activation(value);
    } else if (key == "gmm.components") {
      p.gmm.components = static_cast<int>(detail::config_int(value, where));
    } else if (key == "gmm.max_iterations") {
      p.gmm.max_iterations = static_cast<int>(detail::config_int(value, where));
    } else if (key == "gmm.tolerance") {
      p.gmm.tolerance = detail::config_double(value, where);
    } else if (key == "gmm.covariance_floor") {
      p.gmm.covariance_floor = detail::config_double(value, where);
    } else if (key == "motion.feature_mode") {
      p.motion_feature_mode = parse_motion_feature_mode(value);
    } else if (key == "fusion.object_weight") {
      p.fusion.object_weight = detail::config_double(value, where);
    } else if (key == "fusion.action_weight") {
      p.fusion.action_weight = detail::config_double(value, where);
    } else if (key == "fusion.motion_weight") {
      p.fusion.motion_weight = detail::config_double(value, where);
    } else if (key == "fusion.decision_threshold") {
      p.fusion.decision_threshold = detail::config_double(value, where);
    } else if (key == "fusion.missing_branch_policy") {
      p.fusion.missing_branch = parse_missing_branch_policy(value);
    } else if (key == "fusion.motion_flag_threshold") {
      p.motion_flag_threshold = detail::config_double(value, where);
    } else if (key == "scene.width") {
      s.frame_width = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.height") {
      s.frame_height = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.frames") {
      s.frames_per_split = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.normal_targets") {
      s.normal_targets = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.abnormal_targets") {
      s.abnormal_targets = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.anomaly_kinds") {
      s.anomaly_kinds.clear();
      for (const auto& item : detail::split_commas(value)) {
        s.anomaly_kinds.push_back(parse_anomaly_kind(item));
      }
    } else if (key == "scene.normal_speed_min") {
      s.normal_speed_min = detail::config_double(value, where);
    } else if (key == "scene.normal_speed_max") {
      s.normal_speed_max = detail::config_double(value, where);
    } else if (key == "scene.fast_speed_min") {
      s.fast_speed_min = detail::config_double(value, where);
    } else if (key == "scene.fast_speed_max") {
      s.fast_speed_max = detail::config_double(value, where);
    } else if (key == "scene.confidence_noise") {
      s.confidence_noise = detail::config_double(value, where);
    } else if (key == "scene.segment_length") {
      s.segment_length = static_cast<int>(detail::config_int(value, where));
    } else if (key == "scene.seed") {
      s.seed = detail::config_uint(value, where);
    } else {
      throw ConfigError(where + ": unknown config key '" + key + "'");
    }
  }
}

}  // namespace trifuse
