#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trifuse/action_branch.hpp"
#include "trifuse/autoencoder.hpp"
#include "trifuse/config.hpp"
#include "trifuse/core.hpp"
#include "trifuse/dataset.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/evaluation.hpp"
#include "trifuse/format.hpp"
#include "trifuse/fusion.hpp"
#include "trifuse/gmm.hpp"
#include "trifuse/hmof.hpp"
#include "trifuse/model_io.hpp"
#include "trifuse/motion_branch.hpp"
#include "trifuse/object_branch.hpp"

namespace trifuse {

struct TrainedModels {
  LabelList label_list;
  ActionList action_list;
  AutoencoderModel autoencoder;
  GmmModel gmm;
};

/// Full per-(frame, target) output row: branch scores, fused verdict and the
/// explanation triple, plus the box for pixel-level evaluation.
struct ResultRecord {
  std::string target_id;
  int frame_index = 0;
  BoundingBox bbox;
  std::optional<ScorePair> object;
  std::optional<ScorePair> action;
  std::optional<ScorePair> motion;
  double fused_raw = 0.0;
  double fused_normalized = 0.0;
  bool abnormal = false;
  Explanation explanation;
};

struct ScoringResult {
  std::vector<ResultRecord> records;
  std::vector<ScoredTarget> object_scores;
  std::vector<ScoredTarget> action_scores;
  std::vector<ScoredTarget> motion_scores;
};

struct PipelineSummary {
  std::size_t record_count = 0;
  int test_frames = 0;
  int abnormal_frames = 0;
  double frame_auc = 0.0;
  double frame_eer = 0.0;
  double pixel_auc = 0.0;
  double pixel_eer = 0.0;
  double object_frame_auc = 0.0;
  double action_frame_auc = 0.0;
  double motion_frame_auc = 0.0;
  RocCurve frame_curve;
  RocCurve pixel_curve;
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string(stage) + ": " + e.what());
  }
}

inline void check_segment_lengths(const SplitData& split, int segment_length,
                                  const char* split_name) {
  for (const auto& s : split.segments) {
    if (static_cast<int>(s.frames.size()) != segment_length) {
      throw DataError(std::string(split_name) + " split: segment for target '" +
                      s.target_id + "' has " + std::to_string(s.frames.size()) +
                      " frames, configured tracking length is " +
                      std::to_string(segment_length));
    }
  }
}

}  // namespace detail

struct HmofEntry {
  std::string target_id;
  int frame_index = 0;
  HmofFeature feature;
};

/// One histogram per detection, computed over the detection's box in the
/// frame's flow field.
inline std::vector<HmofEntry> extract_hmof(const SplitData& split,
                                           const HmofConfig& cfg) {
  std::vector<HmofEntry> entries;
  entries.reserve(split.detections.size());
  for (const auto& d : split.detections) {
    const auto flow = split.flows.find(d.frame_index);
    if (flow == split.flows.end()) {
      throw DataError("no flow field for frame " + std::to_string(d.frame_index));
    }
    entries.push_back(
        HmofEntry{d.target_id, d.frame_index, compute_hmof(flow->second, d.bbox, cfg)});
  }
  return entries;
}

/// Training pass over the normal-only split: whitelists, the reconstruction
/// network, and the mixture over the configured motion features.
inline TrainedModels train_models(const Dataset& dataset,
                                  const PipelineConfig& cfg) {
  detail::check_segment_lengths(dataset.training, cfg.segment_length, "training");
  if (dataset.training.detections.empty()) {
    throw DataError("training split has no detections");
  }

  TrainedModels models;
  models.label_list = build_label_list(dataset.training.detections,
                                       cfg.object_confidence_threshold);
  models.action_list = build_action_list(dataset.training.segments,
                                         cfg.action_confidence_threshold);

  const std::vector<HmofEntry> entries = extract_hmof(dataset.training, cfg.hmof);
  std::vector<HmofFeature> features;
  features.reserve(entries.size());
  for (const auto& e : entries) features.push_back(e.feature);
  models.autoencoder = train_autoencoder(features, cfg.autoencoder);

  std::vector<std::vector<double>> classifier_features;
  classifier_features.reserve(entries.size());
  for (const auto& e : entries) {
    classifier_features.push_back(
        motion_feature(models.autoencoder, e.feature, cfg.motion_feature_mode));
  }
  models.gmm = fit_gmm(classifier_features, cfg.gmm);
  return models;
}

/// Scores every test target through the three branches, fuses, and attaches
/// explanations. Branch scores join on (target, frame); the action score of
/// a segment attaches to its last frame.
inline ScoringResult score_dataset(const Dataset& dataset,
                                   const PipelineConfig& cfg,
                                   const TrainedModels& models) {
  detail::check_segment_lengths(dataset.testing, cfg.segment_length, "testing");
  if (dataset.testing.detections.empty()) {
    throw DataError("testing split has no detections");
  }

  ScoringResult result;
  result.object_scores =
      score_object_batch(dataset.testing.detections, models.label_list);
  if (!dataset.testing.segments.empty()) {
    result.action_scores =
        score_action_batch(dataset.testing.segments, models.action_list);
  }

  const std::vector<HmofEntry> hmof_entries =
      extract_hmof(dataset.testing, cfg.hmof);
  std::vector<MotionEntry> motion_entries;
  motion_entries.reserve(hmof_entries.size());
  for (const auto& e : hmof_entries) {
    motion_entries.push_back(MotionEntry{
        e.target_id, e.frame_index,
        motion_feature(models.autoencoder, e.feature, cfg.motion_feature_mode)});
  }
  if (!motion_entries.empty()) {
    result.motion_scores = score_motion_batch(motion_entries, models.gmm);
  }

  using Key = std::pair<std::string, int>;
  std::map<Key, ScorePair> action_by_key;
  for (const auto& s : result.action_scores) {
    action_by_key[{s.target_id, s.frame_index}] = ScorePair{s.raw, s.normalized};
  }
  std::map<Key, ScorePair> motion_by_key;
  for (const auto& s : result.motion_scores) {
    motion_by_key[{s.target_id, s.frame_index}] = ScorePair{s.raw, s.normalized};
  }
  std::map<Key, const TrackSegment*> segment_by_key;
  for (const auto& s : dataset.testing.segments) {
    segment_by_key[{s.target_id, s.last_frame()}] = &s;
  }

  std::vector<BranchScores> branch_scores(dataset.testing.detections.size());
  for (std::size_t i = 0; i < dataset.testing.detections.size(); ++i) {
    const Detection& d = dataset.testing.detections[i];
    BranchScores& b = branch_scores[i];
    b.target_id = d.target_id;
    b.frame_index = d.frame_index;
    b.object = ScorePair{result.object_scores[i].raw,
                         result.object_scores[i].normalized};
    const Key key{d.target_id, d.frame_index};
    if (const auto it = action_by_key.find(key); it != action_by_key.end()) {
      b.action = it->second;
    }
    if (const auto it = motion_by_key.find(key); it != motion_by_key.end()) {
      b.motion = it->second;
    }
  }

  const std::vector<FusedScore> fused = fuse_batch(branch_scores, cfg.fusion);

  result.records.resize(branch_scores.size());
  for (std::size_t i = 0; i < branch_scores.size(); ++i) {
    const Detection& d = dataset.testing.detections[i];
    ResultRecord& r = result.records[i];
    r.target_id = d.target_id;
    r.frame_index = d.frame_index;
    r.bbox = d.bbox;
    r.object = branch_scores[i].object;
    r.action = branch_scores[i].action;
    r.motion = branch_scores[i].motion;
    r.fused_raw = fused[i].raw;
    r.fused_normalized = fused[i].normalized;
    r.abnormal = fused[i].abnormal;
    const Key key{d.target_id, d.frame_index};
    const auto seg = segment_by_key.find(key);
    r.explanation = explain(
        d, seg == segment_by_key.end() ? nullptr : seg->second,
        r.motion ? r.motion->normalized : 0.0, cfg.motion_flag_threshold);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Results file: one tab-separated record per (frame, target). Absent branch
// scores render as '-'. Doubles use round-trippable formatting, so re-reading
// restores bit-identical values.

inline void write_results(std::span<const ResultRecord> records,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "# frame\ttarget\tx\ty\tw\th\tobject_raw\tobject_norm\taction_raw\t"
         "action_norm\tmotion_raw\tmotion_norm\tfused_raw\tfused_norm\t"
         "decision\tobject_label\taction_label\tmotion_flag\n";
  auto pair_text = [](const std::optional<ScorePair>& p, bool raw) {
    if (!p) return std::string("-");
    return detail::format_double(raw ? p->raw : p->normalized);
  };
  for (const auto& r : records) {
    out << r.frame_index << '\t' << r.target_id << '\t' << r.bbox.x << '\t'
        << r.bbox.y << '\t' << r.bbox.width << '\t' << r.bbox.height << '\t'
        << pair_text(r.object, true) << '\t' << pair_text(r.object, false)
        << '\t' << pair_text(r.action, true) << '\t' << pair_text(r.action, false)
        << '\t' << pair_text(r.motion, true) << '\t' << pair_text(r.motion, false)
        << '\t' << detail::format_double(r.fused_raw) << '\t'
        << detail::format_double(r.fused_normalized) << '\t'
        << (r.abnormal ? "abnormal" : "normal") << '\t'
        << r.explanation.object_label << '\t' << r.explanation.action_label
        << '\t' << r.explanation.motion_flag << '\n';
  }
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

inline std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ResultRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = path.string() + " line " + std::to_string(line_number);
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 18) {
      throw DataError(where + ": expected 18 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    ResultRecord r;
    r.frame_index = static_cast<int>(detail::parse_int(fields[0], where));
    r.target_id = fields[1];
    r.bbox.x = static_cast<int>(detail::parse_int(fields[2], where));
    r.bbox.y = static_cast<int>(detail::parse_int(fields[3], where));
    r.bbox.width = static_cast<int>(detail::parse_int(fields[4], where));
    r.bbox.height = static_cast<int>(detail::parse_int(fields[5], where));
    auto read_pair = [&](const std::string& raw_text,
                         const std::string& norm_text) -> std::optional<ScorePair> {
      const bool raw_absent = raw_text == "-";
      const bool norm_absent = norm_text == "-";
      if (raw_absent != norm_absent) {
        throw DataError(where + ": half-absent score pair");
      }
      if (raw_absent) return std::nullopt;
      return ScorePair{detail::parse_double(raw_text, where),
                       detail::parse_double(norm_text, where)};
    };
    r.object = read_pair(fields[6], fields[7]);
    r.action = read_pair(fields[8], fields[9]);
    r.motion = read_pair(fields[10], fields[11]);
    r.fused_raw = detail::parse_double(fields[12], where);
    r.fused_normalized = detail::parse_double(fields[13], where);
    if (fields[14] != "abnormal" && fields[14] != "normal") {
      throw DataError(where + ": decision must be 'abnormal' or 'normal'");
    }
    r.abnormal = fields[14] == "abnormal";
    r.explanation =
        Explanation{fields[15], fields[16], fields[17]};
    records.push_back(std::move(r));
  }
  return records;
}

/// Frame- and pixel-level evaluation of a result set against ground-truth
/// masks, including per-branch frame-level AUCs for the summary.
inline PipelineSummary evaluate_results(std::span<const ResultRecord> records,
                                        const std::map<int, Mask>& masks) {
  PipelineSummary summary;
  summary.record_count = records.size();
  summary.test_frames = static_cast<int>(masks.size());
  for (const auto& [frame, mask] : masks) {
    if (mask.abnormal_count() > 0) ++summary.abnormal_frames;
  }

  std::vector<std::pair<int, double>> fused_pairs;
  fused_pairs.reserve(records.size());
  for (const auto& r : records) {
    fused_pairs.emplace_back(r.frame_index, r.fused_normalized);
  }
  summary.frame_curve = roc(frame_scores(fused_pairs, masks));
  summary.frame_auc = auc(summary.frame_curve);
  summary.frame_eer = eer(summary.frame_curve);

  std::map<int, FrameTargets> by_frame;
  for (const auto& r : records) {
    auto& entry = by_frame[r.frame_index];
    entry.frame_index = r.frame_index;
    entry.targets.push_back(ScoredBox{r.bbox, r.fused_normalized});
  }
  std::vector<FrameTargets> frame_targets;
  frame_targets.reserve(by_frame.size());
  for (auto& [frame, entry] : by_frame) frame_targets.push_back(std::move(entry));
  summary.pixel_curve = pixel_roc(frame_targets, masks);
  summary.pixel_auc = auc(summary.pixel_curve);
  summary.pixel_eer = eer(summary.pixel_curve);

  auto branch_auc = [&](auto select) {
    std::vector<std::pair<int, double>> pairs;
    for (const auto& r : records) {
      const std::optional<ScorePair>& p = select(r);
      if (p) pairs.emplace_back(r.frame_index, p->normalized);
    }
    return auc(roc(frame_scores(pairs, masks)));
  };
  summary.object_frame_auc =
      branch_auc([](const ResultRecord& r) -> const std::optional<ScorePair>& {
        return r.object;
      });
  summary.action_frame_auc =
      branch_auc([](const ResultRecord& r) -> const std::optional<ScorePair>& {
        return r.action;
      });
  summary.motion_frame_auc =
      branch_auc([](const ResultRecord& r) -> const std::optional<ScorePair>& {
        return r.motion;
      });
  return summary;
}

inline void write_summary(const PipelineSummary& summary,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "records = " << summary.record_count << '\n'
      << "frames = " << summary.test_frames << '\n'
      << "abnormal_frames = " << summary.abnormal_frames << '\n'
      << "frame.auc = " << detail::format_double(summary.frame_auc) << '\n'
      << "frame.eer = " << detail::format_double(summary.frame_eer) << '\n'
      << "pixel.auc = " << detail::format_double(summary.pixel_auc) << '\n'
      << "pixel.eer = " << detail::format_double(summary.pixel_eer) << '\n'
      << "branch.object.frame_auc = "
      << detail::format_double(summary.object_frame_auc) << '\n'
      << "branch.action.frame_auc = "
      << detail::format_double(summary.action_frame_auc) << '\n'
      << "branch.motion.frame_auc = "
      << detail::format_double(summary.motion_frame_auc) << '\n';
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

/// End-to-end run: train on the normal split, score the test split, fuse,
/// evaluate at both levels, and write every artifact (whitelists, model
/// files, results, ROC tables, summary) into the output directory.
inline PipelineSummary run_pipeline(const PipelineConfig& cfg,
                                    const std::filesystem::path& data_root,
                                    const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const Dataset dataset = detail::run_stage(
      "load", [&] { return load_dataset(data_root); });

  const TrainedModels models = detail::run_stage("train", [&] {
    TrainedModels m = train_models(dataset, cfg);
    save_label_list(m.label_list, out_dir / "label_list.txt");
    save_action_list(m.action_list, out_dir / "action_list.txt");
    save_autoencoder(m.autoencoder, out_dir / "autoencoder.tfae");
    save_gmm(m.gmm, out_dir / "gmm.tfgm");
    return m;
  });

  const ScoringResult scoring = detail::run_stage("score", [&] {
    ScoringResult s = score_dataset(dataset, cfg, models);
    write_results(s.records, out_dir / "results.tsv");
    return s;
  });

  return detail::run_stage("eval", [&] {
    PipelineSummary summary = evaluate_results(scoring.records, dataset.testing.masks);
    write_roc_points(summary.frame_curve, out_dir / "roc_frame.txt");
    write_roc_points(summary.pixel_curve, out_dir / "roc_pixel.txt");
    write_threshold_table(summary.frame_curve, out_dir / "thresholds_frame.txt");
    write_threshold_table(summary.pixel_curve, out_dir / "thresholds_pixel.txt");
    write_summary(summary, out_dir / "summary.txt");
    return summary;
  });
}

}  // namespace trifuse
