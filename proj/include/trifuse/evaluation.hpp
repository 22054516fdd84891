#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trifuse/core.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/format.hpp"
#include "trifuse/geometry.hpp"
#include "trifuse/mask.hpp"

namespace trifuse {

/// One evaluated frame: the maximum fused score over its targets and the
/// ground-truth verdict (any abnormal pixel makes the frame abnormal).
struct FrameScore {
  int frame_index = 0;
  double score = 0.0;
  bool gt_abnormal = false;
};

/// One ROC operating point. Predictions use the strict rule `score >
/// threshold`; the sentinels at +/-infinity pin the (0,0) and (1,1) ends.
struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

/// Per-frame score aggregation: the frame score is the maximum score over
/// the frame's targets, zero when the frame has none. Every mask frame
/// produces an entry; every scored frame must carry a mask.
inline std::vector<FrameScore> frame_scores(
    std::span<const std::pair<int, double>> target_scores,
    const std::map<int, Mask>& masks) {
  for (const auto& [frame, score] : target_scores) {
    (void)score;
    if (!masks.contains(frame)) {
      throw DataError("missing ground-truth mask for frame " +
                      std::to_string(frame));
    }
  }
  std::map<int, double> best;
  for (const auto& [frame, score] : target_scores) {
    auto [it, inserted] = best.emplace(frame, score);
    if (!inserted) it->second = std::max(it->second, score);
  }
  std::vector<FrameScore> out;
  out.reserve(masks.size());
  for (const auto& [frame, mask] : masks) {
    const auto it = best.find(frame);
    out.push_back(FrameScore{frame, it == best.end() ? 0.0 : it->second,
                             mask.abnormal_count() > 0});
  }
  return out;
}

inline std::vector<FrameScore> frame_scores(std::span<const FusedScore> results,
                                            const std::map<int, Mask>& masks) {
  std::vector<std::pair<int, double>> pairs;
  pairs.reserve(results.size());
  for (const auto& r : results) pairs.emplace_back(r.frame_index, r.normalized);
  return frame_scores(pairs, masks);
}

/// Localization test: true iff the union of the predicted regions covers
/// strictly more than 40% of the truly abnormal pixels. Undefined (and an
/// error) on frames without abnormal pixels; callers filter those out.
inline bool pixel_level_hit(std::span<const BoundingBox> predicted_regions,
                            const Mask& gt) {
  const std::size_t total = gt.abnormal_count();
  if (total == 0) {
    throw NumericError("pixel criterion undefined on normal frame");
  }
  std::vector<char> seen(gt.pixels.size(), 0);
  std::size_t covered = 0;
  for (const auto& box : predicted_regions) {
    if (!box_in_frame(box, gt.width, gt.height)) {
      throw DataError("pixel_level_hit: predicted region outside mask bounds");
    }
    for (int y = box.y; y < box.y + box.height; ++y) {
      for (int x = box.x; x < box.x + box.width; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * gt.width + x;
        if (!seen[idx]) {
          seen[idx] = 1;
          if (gt.pixels[idx] != 0) ++covered;
        }
      }
    }
  }
  // covered / total > 2/5, kept in integers so the boundary is exact
  return covered * 5 > total * 2;
}

/// Frame-level ROC: one operating point per distinct score plus sentinels,
/// predictions counted with the strict rule `score > threshold`.
inline RocCurve roc(std::span<const FrameScore> frames) {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (const auto& f : frames) {
    (f.gt_abnormal ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw NumericError("degenerate ROC: ground truth contains a single class");
  }

  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(frames.size());
  for (const auto& f : frames) sorted.emplace_back(f.score, f.gt_abnormal);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double inf = std::numeric_limits<double>::infinity();
  RocCurve curve;
  curve.points.push_back({inf, 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].first;
    curve.points.push_back({t,
                            static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
    while (i < sorted.size() && sorted[i].first == t) {
      (sorted[i].second ? tp : fp) += 1;
      ++i;
    }
  }
  curve.points.push_back({-inf, 1.0, 1.0});
  return curve;
}

/// Target box with its fused score, the unit of pixel-level evaluation.
struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

struct FrameTargets {
  int frame_index = 0;
  std::vector<ScoredBox> targets;
};

/// Pixel-level ROC. A positive frame counts as a true positive at threshold
/// t only when the boxes scoring above t cover strictly more than 40% of its
/// abnormal pixels; negative frames count as false positives when any box
/// scores above t. The closing sentinel treats threshold -infinity as
/// flagging the entire frame, which pins the curve's (1,1) end.
inline RocCurve pixel_roc(std::span<const FrameTargets> frames,
                          const std::map<int, Mask>& masks) {
  struct FrameState {
    const Mask* mask = nullptr;
    bool positive = false;
    std::size_t total_abnormal = 0;
    std::vector<ScoredBox> targets;  // sorted by descending score
    std::size_t next = 0;
    std::vector<char> seen;
    std::size_t covered = 0;
    bool flagged = false;
    bool hit = false;
  };

  std::map<int, FrameState> states;
  for (const auto& [frame, mask] : masks) {
    FrameState s;
    s.mask = &mask;
    s.total_abnormal = mask.abnormal_count();
    s.positive = s.total_abnormal > 0;
    states.emplace(frame, std::move(s));
  }
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (const auto& [frame, s] : states) {
    (s.positive ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw NumericError("degenerate ROC: ground truth contains a single class");
  }

  std::vector<double> thresholds;
  for (const auto& f : frames) {
    auto it = states.find(f.frame_index);
    if (it == states.end()) {
      throw DataError("missing ground-truth mask for frame " +
                      std::to_string(f.frame_index));
    }
    FrameState& s = it->second;
    for (const auto& t : f.targets) {
      if (!box_in_frame(t.box, s.mask->width, s.mask->height)) {
        throw DataError("pixel_roc: target region outside mask bounds in frame " +
                        std::to_string(f.frame_index));
      }
      s.targets.push_back(t);
      thresholds.push_back(t.score);
    }
  }
  for (auto& [frame, s] : states) {
    if (s.positive) s.seen.assign(s.mask->pixels.size(), 0);
    std::sort(s.targets.begin(), s.targets.end(),
              [](const ScoredBox& a, const ScoredBox& b) {
                return a.score > b.score;
              });
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::size_t tp = 0;
  std::size_t fp = 0;
  auto flag_box = [&](FrameState& s, const BoundingBox& box) {
    if (!s.flagged) {
      s.flagged = true;
      if (!s.positive) ++fp;
    }
    if (!s.positive || s.hit) return;
    for (int y = box.y; y < box.y + box.height; ++y) {
      for (int x = box.x; x < box.x + box.width; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * s.mask->width + x;
        if (!s.seen[idx]) {
          s.seen[idx] = 1;
          if (s.mask->pixels[idx] != 0) ++s.covered;
        }
      }
    }
    if (s.covered * 5 > s.total_abnormal * 2) {
      s.hit = true;
      ++tp;
    }
  };

  const double inf = std::numeric_limits<double>::infinity();
  RocCurve curve;
  curve.points.push_back({inf, 0.0, 0.0});
  for (const double t : thresholds) {
    for (auto& [frame, s] : states) {
      while (s.next < s.targets.size() && s.targets[s.next].score > t) {
        flag_box(s, s.targets[s.next].box);
        ++s.next;
      }
    }
    curve.points.push_back({t,
                            static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
  }
  curve.points.push_back({-inf, 1.0, 1.0});
  return curve;
}

/// Trapezoidal area under the (FPR, TPR) polyline.
inline double auc(const RocCurve& curve) {
  if (curve.points.size() < 2) throw NumericError("auc: curve has too few points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    if (b.fpr < a.fpr) throw NumericError("auc: curve not sorted by FPR");
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

/// Equal error rate: the FPR where FPR = 1 - TPR, located by linear
/// interpolation between the bracketing curve points. FPR + TPR - 1 is
/// non-decreasing along a valid curve, so the first sign change brackets the
/// crossing.
inline double eer(const RocCurve& curve) {
  if (curve.points.size() < 2) throw NumericError("eer: curve has too few points");
  auto gap = [](const RocPoint& p) { return p.fpr + p.tpr - 1.0; };
  if (gap(curve.points.front()) >= 0.0) return curve.points.front().fpr;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    if (gap(b) < 0.0) continue;
    const double ga = gap(a);
    const double gb = gap(b);
    const double s = (gb == ga) ? 0.0 : (0.0 - ga) / (gb - ga);
    return a.fpr + s * (b.fpr - a.fpr);
  }
  return curve.points.back().fpr;
}

/// Two-column text: FPR TPR per line.
inline void write_roc_points(const RocCurve& curve,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (const auto& p : curve.points) {
    out << detail::format_double(p.fpr) << ' ' << detail::format_double(p.tpr)
        << '\n';
  }
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

/// Threshold table: threshold FPR TPR per line, sentinels included.
inline void write_threshold_table(const RocCurve& curve,
                                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "# threshold fpr tpr\n";
  for (const auto& p : curve.points) {
    out << detail::format_double(p.threshold) << ' '
        << detail::format_double(p.fpr) << ' ' << detail::format_double(p.tpr)
        << '\n';
  }
  if (!out.flush()) throw DataError("write failed: " + path.string());
}

}  // namespace trifuse
