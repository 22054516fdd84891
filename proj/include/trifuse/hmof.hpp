#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "trifuse/core.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/geometry.hpp"

namespace trifuse {

/// Histogram-of-flow-magnitude layout: `bins` uniform cells on
/// [0, magnitude_cap) plus one overflow cell for magnitudes at or above the
/// cap.
struct HmofConfig {
  int bins = 8;
  double magnitude_cap = 1.8;
};

inline void validate(const HmofConfig& cfg) {
  if (cfg.bins < 2) throw ConfigError("hmof bins must be >= 2");
  if (!(cfg.magnitude_cap > 0.0)) {
    throw ConfigError("hmof magnitude cap must be positive");
  }
}

/// Count-normalized magnitude histogram of one target region; bins.size() is
/// always config bins + 1 (the last cell collects capped magnitudes).
struct HmofFeature {
  std::vector<double> bins;
};

/// Histogram of flow magnitudes over the target's box. Each pixel with
/// magnitude m < cap lands in cell floor(m / (cap/bins)); m >= cap lands in
/// the overflow cell. The histogram is divided by the pixel count, so the
/// cells sum to one for any non-empty region.
inline HmofFeature compute_hmof(const FlowField& flow, const BoundingBox& box,
                                const HmofConfig& cfg) {
  validate(cfg);
  if (box.width <= 0 || box.height <= 0) {
    throw DataError("compute_hmof: empty region");
  }
  if (!box_in_frame(box, flow.width, flow.height)) {
    throw DataError("compute_hmof: region outside flow bounds");
  }

  const std::size_t n = static_cast<std::size_t>(cfg.bins);
  const double cell = cfg.magnitude_cap / cfg.bins;
  HmofFeature feature;
  feature.bins.assign(n + 1, 0.0);

  for (int y = box.y; y < box.y + box.height; ++y) {
    for (int x = box.x; x < box.x + box.width; ++x) {
      const FlowVector& v = flow.at(x, y);
      const double u = v.u;
      const double w = v.v;
      const double magnitude = std::sqrt(u * u + w * w);
      std::size_t idx;
      if (magnitude >= cfg.magnitude_cap) {
        idx = n;
      } else {
        // clamp guards against rounding pushing m/cell to exactly bins
        idx = std::min(static_cast<std::size_t>(magnitude / cell), n - 1);
      }
      feature.bins[idx] += 1.0;
    }
  }

  const double count = static_cast<double>(box_area(box));
  for (double& b : feature.bins) b /= count;
  return feature;
}

}  // namespace trifuse
