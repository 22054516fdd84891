#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trifuse/errors.hpp"
#include "trifuse/geometry.hpp"

namespace trifuse {

/// One object-detector observation. Ingestion keeps exactly one detection per
/// target per frame (only the top-confidence label of a target survives).
struct Detection {
  int frame_index = 0;
  std::string target_id;
  BoundingBox bbox;
  std::string object_label;
  double object_confidence = 0.0;

  bool operator==(const Detection&) const = default;
};

/// A tracked target window: consecutive per-frame boxes plus the action
/// recognizer's verdict for that window. The configured tracking length
/// fixes frames.size() for every segment of a dataset.
struct TrackSegment {
  std::string target_id;
  std::vector<std::pair<int, BoundingBox>> frames;  // (frame_index, box), strictly consecutive
  std::string action_label;
  double action_confidence = 0.0;

  int first_frame() const { return frames.front().first; }
  int last_frame() const { return frames.back().first; }

  bool operator==(const TrackSegment&) const = default;
};

struct FlowVector {
  float u = 0.0f;
  float v = 0.0f;

  bool operator==(const FlowVector&) const = default;
};

/// Dense per-pixel optical flow for one frame, in pixels/frame, row-major.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<FlowVector> vectors;

  const FlowVector& at(int x, int y) const {
    return vectors[static_cast<std::size_t>(y) * width + x];
  }
  FlowVector& at(int x, int y) {
    return vectors[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const FlowField&) const = default;
};

/// A branch's raw score together with its batch-normalized value in [0,1].
struct ScorePair {
  double raw = 0.0;
  double normalized = 0.0;

  bool operator==(const ScorePair&) const = default;
};

/// Per-(target, frame) branch scores. A branch is absent when its upstream
/// stage produced nothing for this target at this frame (no track segment,
/// no flow field).
struct BranchScores {
  std::string target_id;
  int frame_index = 0;
  std::optional<ScorePair> object;
  std::optional<ScorePair> action;
  std::optional<ScorePair> motion;
};

/// Human-readable account of one decision: what the target is, what it does,
/// and whether its motion fits the learned distribution.
struct Explanation {
  std::string object_label;
  std::string action_label;  // "unknown-action" when no segment covers the frame
  std::string motion_flag;   // "normal motion" or "abnormal motion"

  bool operator==(const Explanation&) const = default;
};

/// Final fused verdict for one (target, frame).
struct FusedScore {
  std::string target_id;
  int frame_index = 0;
  double raw = 0.0;
  double normalized = 0.0;
  bool abnormal = false;  // normalized strictly above the decision threshold
  Explanation explanation;
};

/// (target, frame) reference paired with one branch's raw/normalized score.
struct ScoredTarget {
  std::string target_id;
  int frame_index = 0;
  double raw = 0.0;
  double normalized = 0.0;
};

namespace detail {

inline std::pair<double, double> checked_min_max(std::span<const double> scores,
                                                 const char* op) {
  if (scores.empty()) {
    throw NumericError(std::string(op) + ": empty score list");
  }
  double lo = scores[0];
  double hi = scores[0];
  for (const double s : scores) {
    if (!std::isfinite(s)) {
      throw NumericError(std::string(op) + ": non-finite score");
    }
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

}  // namespace detail

/// Two-pass batch min-max rescale onto [0,1]: min maps to 0, max to 1, order
/// is preserved. A degenerate list (max == min) maps every element to the
/// neutral midpoint 0.5.
inline std::vector<double> min_max_normalize(std::span<const double> scores) {
  const auto [lo, hi] = detail::checked_min_max(scores, "min_max_normalize");
  std::vector<double> out(scores.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = (scores[i] - lo) / range;
  }
  return out;
}

/// Order-reversing variant: max maps to 0, min to 1. Used where a high raw
/// value means "normal" (likelihood scores).
inline std::vector<double> min_max_invert_normalize(std::span<const double> scores) {
  const auto [lo, hi] =
      detail::checked_min_max(scores, "min_max_invert_normalize");
  std::vector<double> out(scores.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = (hi - scores[i]) / range;
  }
  return out;
}

}  // namespace trifuse
