#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "trifuse/dataset.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/rng.hpp"

namespace trifuse {

/// The three anomaly flavors a scene can stage. Each is visible to exactly
/// one branch: an unfamiliar label, an unfamiliar action, or flow magnitudes
/// beyond the histogram cap.
enum class AnomalyKind { novel_object, novel_action, fast_motion };

inline std::string to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::novel_object: return "novel-object";
    case AnomalyKind::novel_action: return "novel-action";
    case AnomalyKind::fast_motion: return "fast-motion";
  }
  return "novel-object";
}

inline AnomalyKind parse_anomaly_kind(const std::string& text) {
  if (text == "novel-object") return AnomalyKind::novel_object;
  if (text == "novel-action") return AnomalyKind::novel_action;
  if (text == "fast-motion") return AnomalyKind::fast_motion;
  throw ConfigError("unknown anomaly kind '" + text +
                    "' (expected novel-object, novel-action, or fast-motion)");
}

/// Desk-scale stand-in for a surveillance benchmark: straight-line movers
/// with analytic flow, whitelisted labels/actions for the normal population,
/// and per-kind anomalies staged in windows of the testing split.
struct SyntheticSceneConfig {
  int frame_width = 160;
  int frame_height = 120;
  int frames_per_split = 150;
  int normal_targets = 5;
  int abnormal_targets = 3;
  std::vector<AnomalyKind> anomaly_kinds{AnomalyKind::novel_object,
                                         AnomalyKind::novel_action,
                                         AnomalyKind::fast_motion};
  double normal_speed_min = 0.6;
  double normal_speed_max = 1.4;
  double fast_speed_min = 3.0;
  double fast_speed_max = 4.5;
  double confidence_noise = 0.01;
  int segment_length = 5;
  std::uint64_t seed = 7;
};

inline void validate(const SyntheticSceneConfig& cfg) {
  if (cfg.frame_width < 48 || cfg.frame_height < 48) {
    throw ConfigError("scene frames must be at least 48x48");
  }
  if (cfg.segment_length < 1) throw ConfigError("scene segment length must be >= 1");
  if (cfg.frames_per_split < 2 * cfg.segment_length) {
    throw ConfigError("scene needs at least 2x segment_length frames per split");
  }
  if (cfg.normal_targets < 1) {
    throw ConfigError("scene needs at least one normal target");
  }
  if (cfg.abnormal_targets < 0) {
    throw ConfigError("scene abnormal target count must be >= 0");
  }
  if (cfg.abnormal_targets > 0 && cfg.anomaly_kinds.empty()) {
    throw ConfigError("scene with abnormal targets needs anomaly kinds");
  }
  auto check_range = [](double lo, double hi, const char* name) {
    if (!(lo > 0.0) || !(hi >= lo)) {
      throw ConfigError(std::string(name) + " speed range must be positive and ordered");
    }
  };
  check_range(cfg.normal_speed_min, cfg.normal_speed_max, "normal");
  check_range(cfg.fast_speed_min, cfg.fast_speed_max, "fast");
  if (cfg.confidence_noise < 0.0 || cfg.confidence_noise > 0.5) {
    throw ConfigError("scene confidence noise must lie in [0, 0.5]");
  }
}

namespace detail {

struct Mover {
  std::string id;
  std::string object_label;
  std::string action_label;
  double object_conf_base = 0.0;
  double action_conf_base = 0.0;
  int box_w = 0;
  int box_h = 0;
  double start_x = 0.0;
  double start_y = 0.0;
  double dir_x = 0.0;  // unit heading; bounces flip components
  double dir_y = 0.0;
  // Smooth per-frame speed modulation: speed(f) = center + amplitude *
  // sin(phase + rate * f). A continuum of magnitudes keeps the learned
  // motion distribution from collapsing onto a handful of spikes.
  double speed_center = 0.0;
  double speed_amplitude = 0.0;
  double speed_phase = 0.0;
  double speed_rate = 0.0;
  int active_begin = 0;  // [begin, end) within the split
  int active_end = 0;
  bool abnormal = false;

  double speed_at(int frame) const {
    return speed_center +
           speed_amplitude * std::sin(speed_phase + speed_rate * frame);
  }
};

inline double clamp_confidence(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

/// Deterministic scene synthesis: the same seed yields a byte-identical
/// dataset. Flow fields are constructed from the movers' actual per-frame
/// displacements with a small per-pixel magnitude jitter; masks mark the
/// boxes of abnormal targets.
inline Dataset generate_synthetic(const SyntheticSceneConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const int frames = cfg.frames_per_split;
  const int width = cfg.frame_width;
  const int height = cfg.frame_height;

  auto make_mover = [&](const std::string& id, double speed_lo, double speed_hi) {
    detail::Mover m;
    m.id = id;
    m.box_w = 10 + static_cast<int>(rng.uniform_int(0, 6));
    m.box_h = 14 + static_cast<int>(rng.uniform_int(0, 6));
    m.start_x = rng.uniform(0.0, static_cast<double>(width - m.box_w));
    m.start_y = rng.uniform(0.0, static_cast<double>(height - m.box_h));
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    m.dir_x = std::cos(angle);
    m.dir_y = std::sin(angle);
    // each mover sweeps a sub-band of the speed range; the bands overlap
    // across movers, covering the range as a continuum
    const double half_span = 0.5 * (speed_hi - speed_lo);
    m.speed_amplitude = 0.2 * (speed_hi - speed_lo);
    m.speed_center =
        speed_lo + half_span +
        (half_span - m.speed_amplitude) * rng.symmetric();
    m.speed_phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    m.speed_rate = rng.uniform(0.05, 0.2);
    m.active_begin = 0;
    m.active_end = frames;
    return m;
  };

  std::vector<detail::Mover> movers;
  for (int i = 0; i < cfg.normal_targets; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "norm-%02d", i);
    detail::Mover m = make_mover(id, cfg.normal_speed_min, cfg.normal_speed_max);
    m.object_label = "person";
    m.object_conf_base = 0.97;
    m.action_label = "walking";
    m.action_conf_base = 0.995;
    movers.push_back(std::move(m));
  }

  // Anomaly windows: spread across the testing split, capped so a healthy
  // share of test frames stays anomaly-free (the evaluation needs both
  // classes).
  int window = std::max(frames / 4, 3 * cfg.segment_length);
  if (cfg.abnormal_targets > 0) {
    window = std::min(window, std::max(3 * cfg.segment_length,
                                       (3 * frames) / (4 * cfg.abnormal_targets)));
    window = std::min(window, frames);
  }
  for (int i = 0; i < cfg.abnormal_targets; ++i) {
    const AnomalyKind kind = cfg.anomaly_kinds[i % cfg.anomaly_kinds.size()];
    char id[32];
    std::snprintf(id, sizeof id, "anom-%02d", i);
    const bool fast = kind == AnomalyKind::fast_motion;
    detail::Mover m =
        make_mover(id, fast ? cfg.fast_speed_min : cfg.normal_speed_min,
                   fast ? cfg.fast_speed_max : cfg.normal_speed_max);
    switch (kind) {
      case AnomalyKind::novel_object:
        m.object_label = "cart";
        m.object_conf_base = 0.90;
        m.action_label = "walking";
        m.action_conf_base = 0.95;
        break;
      case AnomalyKind::novel_action:
        m.object_label = "person";
        m.object_conf_base = 0.97;
        m.action_label = "riding";
        m.action_conf_base = 0.90;
        break;
      case AnomalyKind::fast_motion:
        m.object_label = "person";
        m.object_conf_base = 0.97;
        m.action_label = "walking";
        m.action_conf_base = 0.995;
        break;
    }
    m.abnormal = true;
    const int center = ((i + 1) * frames) / (cfg.abnormal_targets + 1);
    m.active_begin = std::clamp(center - window / 2, 0, frames - window);
    m.active_end = m.active_begin + window;
    movers.push_back(std::move(m));
  }

  auto simulate_split = [&](bool include_abnormal, bool with_masks) {
    SplitData split;
    std::vector<std::size_t> cast;
    for (std::size_t i = 0; i < movers.size(); ++i) {
      if (include_abnormal || !movers[i].abnormal) cast.push_back(i);
    }

    // Per-mover float path with reflection at the frame borders.
    std::vector<double> px(cast.size()), py(cast.size());
    std::vector<double> dx_unit(cast.size()), dy_unit(cast.size());
    for (std::size_t c = 0; c < cast.size(); ++c) {
      const detail::Mover& m = movers[cast[c]];
      px[c] = m.start_x;
      py[c] = m.start_y;
      dx_unit[c] = m.dir_x;
      dy_unit[c] = m.dir_y;
    }

    // boxes[c][frame] is the mover's box when active, a null-width box
    // otherwise.
    std::vector<std::vector<BoundingBox>> boxes(
        cast.size(), std::vector<BoundingBox>(static_cast<std::size_t>(frames)));

    for (int frame = 0; frame < frames; ++frame) {
      FlowField flow;
      flow.width = width;
      flow.height = height;
      flow.vectors.assign(static_cast<std::size_t>(width) * height, FlowVector{});
      Mask mask;
      if (with_masks) {
        mask.width = width;
        mask.height = height;
        mask.pixels.assign(static_cast<std::size_t>(width) * height, 0);
      }

      for (std::size_t c = 0; c < cast.size(); ++c) {
        const detail::Mover& m = movers[cast[c]];
        const double speed = m.speed_at(frame);
        double dx = speed * dx_unit[c];
        double dy = speed * dy_unit[c];
        if (frame > 0) {
          const double prev_x = px[c];
          const double prev_y = py[c];
          double nx = px[c] + speed * dx_unit[c];
          double ny = py[c] + speed * dy_unit[c];
          const double max_x = static_cast<double>(width - m.box_w);
          const double max_y = static_cast<double>(height - m.box_h);
          if (nx < 0.0) { nx = -nx; dx_unit[c] = -dx_unit[c]; }
          if (nx > max_x) { nx = 2.0 * max_x - nx; dx_unit[c] = -dx_unit[c]; }
          if (ny < 0.0) { ny = -ny; dy_unit[c] = -dy_unit[c]; }
          if (ny > max_y) { ny = 2.0 * max_y - ny; dy_unit[c] = -dy_unit[c]; }
          px[c] = nx;
          py[c] = ny;
          dx = nx - prev_x;
          dy = ny - prev_y;
        }

        if (frame < m.active_begin || frame >= m.active_end) continue;

        BoundingBox box;
        box.x = std::clamp(static_cast<int>(std::lround(px[c])), 0, width - m.box_w);
        box.y = std::clamp(static_cast<int>(std::lround(py[c])), 0, height - m.box_h);
        box.width = m.box_w;
        box.height = m.box_h;
        boxes[c][static_cast<std::size_t>(frame)] = box;

        Detection d;
        d.frame_index = frame;
        d.target_id = m.id;
        d.bbox = box;
        d.object_label = m.object_label;
        d.object_confidence = detail::clamp_confidence(
            m.object_conf_base + cfg.confidence_noise * rng.symmetric());
        split.detections.push_back(std::move(d));

        for (int y = box.y; y < box.y + box.height; ++y) {
          for (int x = box.x; x < box.x + box.width; ++x) {
            const double jitter = 1.0 + 0.05 * rng.symmetric();
            flow.at(x, y) = FlowVector{static_cast<float>(dx * jitter),
                                       static_cast<float>(dy * jitter)};
          }
        }
        if (with_masks && m.abnormal) {
          for (int y = box.y; y < box.y + box.height; ++y) {
            for (int x = box.x; x < box.x + box.width; ++x) {
              mask.pixels[static_cast<std::size_t>(y) * width + x] = 255;
            }
          }
        }
      }

      split.flows.emplace(frame, std::move(flow));
      if (with_masks) split.masks.emplace(frame, std::move(mask));
    }

    // Overlapping (stride one) tracking windows: one segment per covered
    // end frame, so every frame past the warm-up carries an action score.
    const int k = cfg.segment_length;
    for (std::size_t c = 0; c < cast.size(); ++c) {
      const detail::Mover& m = movers[cast[c]];
      for (int end = m.active_begin + k - 1; end < m.active_end; ++end) {
        TrackSegment s;
        s.target_id = m.id;
        s.action_label = m.action_label;
        s.action_confidence = detail::clamp_confidence(
            m.action_conf_base + cfg.confidence_noise * rng.symmetric());
        for (int f = end - k + 1; f <= end; ++f) {
          s.frames.emplace_back(f, boxes[c][static_cast<std::size_t>(f)]);
        }
        split.segments.push_back(std::move(s));
      }
    }
    return split;
  };

  Dataset dataset;
  dataset.frame_width = width;
  dataset.frame_height = height;
  dataset.train_frame_count = frames;
  dataset.test_frame_count = frames;
  dataset.training = simulate_split(false, false);
  dataset.testing = simulate_split(true, true);
  return dataset;
}

}  // namespace trifuse
