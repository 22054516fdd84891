#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trifuse/core.hpp"
#include "trifuse/errors.hpp"

namespace trifuse {

/// How a target with no score from some branch enters the fusion max:
/// `ignore` drops the branch, `zero` contributes weight * 0.
enum class MissingBranchPolicy { ignore, zero };

inline std::string to_string(MissingBranchPolicy policy) {
  return policy == MissingBranchPolicy::ignore ? "ignore" : "zero";
}

inline MissingBranchPolicy parse_missing_branch_policy(const std::string& text) {
  if (text == "ignore") return MissingBranchPolicy::ignore;
  if (text == "zero") return MissingBranchPolicy::zero;
  throw ConfigError("unknown missing branch policy '" + text +
                    "' (expected ignore or zero)");
}

struct FusionConfig {
  double object_weight = 1.0;
  double action_weight = 1.5;
  double motion_weight = 1.5;
  double decision_threshold = 0.5;  // strict: abnormal iff normalized > threshold
  MissingBranchPolicy missing_branch = MissingBranchPolicy::ignore;
};

inline void validate(const FusionConfig& cfg) {
  if (cfg.object_weight < 0.0 || cfg.action_weight < 0.0 ||
      cfg.motion_weight < 0.0) {
    throw ConfigError("fusion weights must be non-negative");
  }
  if (cfg.object_weight == 0.0 && cfg.action_weight == 0.0 &&
      cfg.motion_weight == 0.0) {
    throw ConfigError("at least one fusion weight must be positive");
  }
  if (!(cfg.decision_threshold >= 0.0 && cfg.decision_threshold <= 1.0)) {
    throw ConfigError("decision threshold must lie in [0,1]");
  }
}

/// Weighted maximum over the present branches' normalized scores. The max
/// guarantees that no branch's alarm can be watered down by the others.
inline double fuse_raw(const BranchScores& scores, const FusionConfig& cfg) {
  validate(cfg);
  if (!scores.object && !scores.action && !scores.motion) {
    throw NumericError("fuse_raw: no branch scores for target '" +
                       scores.target_id + "'");
  }
  bool any = false;
  double best = 0.0;
  auto consider = [&](const std::optional<ScorePair>& branch, double weight) {
    double candidate;
    if (branch) {
      candidate = weight * branch->normalized;
    } else if (cfg.missing_branch == MissingBranchPolicy::zero) {
      candidate = 0.0;
    } else {
      return;
    }
    best = any ? std::max(best, candidate) : candidate;
    any = true;
  };
  consider(scores.object, cfg.object_weight);
  consider(scores.action, cfg.action_weight);
  consider(scores.motion, cfg.motion_weight);
  return best;
}

/// Fuses every record, min-max normalizes the fused scores over the whole
/// batch, and applies the strict decision threshold. Explanations are left
/// empty; the pipeline fills them from detections and segments.
inline std::vector<FusedScore> fuse_batch(std::span<const BranchScores> all_scores,
                                          const FusionConfig& cfg) {
  std::vector<double> raw(all_scores.size());
  for (std::size_t i = 0; i < all_scores.size(); ++i) {
    raw[i] = fuse_raw(all_scores[i], cfg);
  }
  const std::vector<double> normalized = min_max_normalize(raw);
  std::vector<FusedScore> out(all_scores.size());
  for (std::size_t i = 0; i < all_scores.size(); ++i) {
    out[i].target_id = all_scores[i].target_id;
    out[i].frame_index = all_scores[i].frame_index;
    out[i].raw = raw[i];
    out[i].normalized = normalized[i];
    out[i].abnormal = normalized[i] > cfg.decision_threshold;
  }
  return out;
}

/// Explanation triple for one decision. A missing track segment reads as
/// "unknown-action"; the motion flag trips strictly above the threshold.
inline Explanation explain(const Detection& detection,
                           const TrackSegment* segment,
                           double motion_normalized, double flag_threshold) {
  return Explanation{
      detection.object_label,
      segment ? segment->action_label : "unknown-action",
      motion_normalized > flag_threshold ? "abnormal motion" : "normal motion"};
}

}  // namespace trifuse
