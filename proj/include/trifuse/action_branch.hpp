#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "trifuse/core.hpp"
#include "trifuse/object_branch.hpp"

namespace trifuse {

/// Action categories observed in training with confidence strictly above the
/// configured threshold.
struct ActionList {
  std::set<std::string> actions;

  bool contains(const std::string& action) const {
    return actions.contains(action);
  }
};

inline ActionList build_action_list(std::span<const TrackSegment> training,
                                    double confidence_threshold) {
  detail::check_confidence_threshold(confidence_threshold,
                                     "action confidence threshold");
  ActionList list;
  for (const auto& seg : training) {
    if (seg.action_confidence > confidence_threshold) {
      list.actions.insert(seg.action_label);
    }
  }
  return list;
}

/// Raw action anomaly score, structurally identical to the object branch:
/// -confidence for a known action, +confidence otherwise.
inline double score_action_raw(const TrackSegment& seg, const ActionList& list) {
  return detail::whitelist_raw_score(seg.action_label, seg.action_confidence,
                                     list.actions);
}

/// One score per segment, attributed to the segment's last frame, then
/// min-max normalized over the whole batch. With an overlapping tracking
/// cadence (stride one) this yields a score for every covered frame.
inline std::vector<ScoredTarget> score_action_batch(
    std::span<const TrackSegment> test_segments, const ActionList& list) {
  std::vector<double> raw(test_segments.size());
  for (std::size_t i = 0; i < test_segments.size(); ++i) {
    raw[i] = score_action_raw(test_segments[i], list);
  }
  const std::vector<double> normalized = min_max_normalize(raw);
  std::vector<ScoredTarget> out(test_segments.size());
  for (std::size_t i = 0; i < test_segments.size(); ++i) {
    out[i] = {test_segments[i].target_id, test_segments[i].last_frame(), raw[i],
              normalized[i]};
  }
  return out;
}

inline void save_action_list(const ActionList& list,
                             const std::filesystem::path& path) {
  detail::save_whitelist(list.actions, path);
}

inline ActionList load_action_list(const std::filesystem::path& path) {
  return ActionList{detail::load_whitelist(path)};
}

}  // namespace trifuse
