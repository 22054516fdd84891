#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "trifuse/core.hpp"
#include "trifuse/errors.hpp"

namespace trifuse {

namespace detail {

// Shared kernel of the object and action branches: a category seen in
// training flips the sign of the confidence, so familiar targets rank low
// and unfamiliar ones rank high.
inline double whitelist_raw_score(const std::string& label, double confidence,
                                  const std::set<std::string>& whitelist) {
  return whitelist.contains(label) ? -confidence : confidence;
}

inline void check_confidence_threshold(double threshold, const char* name) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError(std::string(name) + " must lie strictly inside (0,1)");
  }
}

inline void save_whitelist(const std::set<std::string>& entries,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open " + path.string() + " for writing");
  }
  for (const auto& e : entries) {  // std::set iterates sorted
    out << e << '\n';
  }
  if (!out.flush()) {
    throw DataError("write failed: " + path.string());
  }
}

inline std::set<std::string> load_whitelist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) entries.insert(line);
  }
  return entries;
}

}  // namespace detail

/// Object labels observed in training with confidence strictly above the
/// configured threshold. Immutable after construction.
struct LabelList {
  std::set<std::string> labels;

  bool contains(const std::string& label) const { return labels.contains(label); }
};

/// Collects every training label whose detector confidence exceeds the
/// threshold (strictly). An empty training set yields an empty list, in
/// which case every test label scores as unfamiliar.
inline LabelList build_label_list(std::span<const Detection> training,
                                  double confidence_threshold) {
  detail::check_confidence_threshold(confidence_threshold,
                                     "object confidence threshold");
  LabelList list;
  for (const auto& d : training) {
    if (d.object_confidence > confidence_threshold) {
      list.labels.insert(d.object_label);
    }
  }
  return list;
}

/// Raw object anomaly score: -confidence for a whitelisted label,
/// +confidence otherwise. Always in [-1, 1].
inline double score_object_raw(const Detection& d, const LabelList& list) {
  return detail::whitelist_raw_score(d.object_label, d.object_confidence,
                                     list.labels);
}

/// Scores every test detection and min-max normalizes over the whole batch.
/// Pairing with (target, frame) is preserved.
inline std::vector<ScoredTarget> score_object_batch(
    std::span<const Detection> test_detections, const LabelList& list) {
  std::vector<double> raw(test_detections.size());
  for (std::size_t i = 0; i < test_detections.size(); ++i) {
    raw[i] = score_object_raw(test_detections[i], list);
  }
  const std::vector<double> normalized = min_max_normalize(raw);
  std::vector<ScoredTarget> out(test_detections.size());
  for (std::size_t i = 0; i < test_detections.size(); ++i) {
    out[i] = {test_detections[i].target_id, test_detections[i].frame_index,
              raw[i], normalized[i]};
  }
  return out;
}

/// Sorted, newline-delimited text file for audit and reuse across runs.
inline void save_label_list(const LabelList& list,
                            const std::filesystem::path& path) {
  detail::save_whitelist(list.labels, path);
}

inline LabelList load_label_list(const std::filesystem::path& path) {
  return LabelList{detail::load_whitelist(path)};
}

}  // namespace trifuse
