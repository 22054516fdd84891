#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "test_util.hpp"
#include "trifuse/hmof.hpp"
#include "trifuse/synthetic.hpp"

using namespace trifuse;

namespace {

SyntheticSceneConfig small_scene() {
  SyntheticSceneConfig cfg;
  cfg.frame_width = 96;
  cfg.frame_height = 72;
  cfg.frames_per_split = 60;
  cfg.normal_targets = 3;
  cfg.abnormal_targets = 3;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed", "[synthetic]") {
  const SyntheticSceneConfig cfg = small_scene();
  const Dataset a = generate_synthetic(cfg);
  const Dataset b = generate_synthetic(cfg);
  REQUIRE(a == b);

  TempDir dir_a("gen_a");
  TempDir dir_b("gen_b");
  save_dataset(a, dir_a.path);
  save_dataset(b, dir_b.path);
  REQUIRE(slurp(dir_a.path / "testing" / "detections.txt") ==
          slurp(dir_b.path / "testing" / "detections.txt"));
  REQUIRE(slurp(dir_a.path / "testing" / "flow" / "000000.tffl") ==
          slurp(dir_b.path / "testing" / "flow" / "000000.tffl"));

  SyntheticSceneConfig other = cfg;
  other.seed = 100;
  REQUIRE_FALSE(generate_synthetic(other) == a);
}

TEST_CASE("fast-motion anomalies overflow the histogram cap", "[synthetic]") {
  SyntheticSceneConfig cfg = small_scene();
  cfg.abnormal_targets = 1;
  cfg.anomaly_kinds = {AnomalyKind::fast_motion};
  const Dataset ds = generate_synthetic(cfg);
  const HmofConfig hmof{8, 1.8};  // cap between normal and fast speeds

  bool checked_fast = false;
  bool checked_normal = false;
  for (const auto& d : ds.testing.detections) {
    const bool fast = d.target_id.rfind("anom-", 0) == 0;
    const HmofFeature f =
        compute_hmof(ds.testing.flows.at(d.frame_index), d.bbox, hmof);
    if (fast) {
      REQUIRE(f.bins.back() > 0.99);
      checked_fast = true;
    } else if (!checked_normal) {
      REQUIRE(f.bins.back() == 0.0);
      checked_normal = true;
    }
  }
  REQUIRE(checked_fast);
  REQUIRE(checked_normal);
}

TEST_CASE("a scene with no abnormal targets has empty masks", "[synthetic]") {
  SyntheticSceneConfig cfg = small_scene();
  cfg.abnormal_targets = 0;
  const Dataset ds = generate_synthetic(cfg);
  for (const auto& [frame, mask] : ds.testing.masks) {
    REQUIRE(mask.abnormal_count() == 0);
  }
}

TEST_CASE("generated structure honors the configured tracking length",
          "[synthetic]") {
  const SyntheticSceneConfig cfg = small_scene();
  const Dataset ds = generate_synthetic(cfg);
  REQUIRE(ds.train_frame_count == cfg.frames_per_split);
  REQUIRE(ds.test_frame_count == cfg.frames_per_split);
  REQUIRE_FALSE(ds.training.detections.empty());
  REQUIRE_FALSE(ds.testing.segments.empty());
  for (const auto& s : ds.training.segments) {
    REQUIRE(static_cast<int>(s.frames.size()) == cfg.segment_length);
    for (std::size_t i = 1; i < s.frames.size(); ++i) {
      REQUIRE(s.frames[i].first == s.frames[i - 1].first + 1);
    }
  }
  // the training split must stay anomaly-free
  for (const auto& d : ds.training.detections) {
    REQUIRE(d.target_id.rfind("norm-", 0) == 0);
  }
  // abnormal targets appear in a window, not the whole sequence
  int abnormal_frames = 0;
  for (const auto& [frame, mask] : ds.testing.masks) {
    if (mask.abnormal_count() > 0) ++abnormal_frames;
  }
  REQUIRE(abnormal_frames > 0);
  REQUIRE(abnormal_frames < ds.test_frame_count);
}

TEST_CASE("a generated dataset passes its own load validation", "[synthetic]") {
  TempDir dir("gen_load");
  const Dataset ds = generate_synthetic(small_scene());
  save_dataset(ds, dir.path);
  REQUIRE(load_dataset(dir.path) == ds);
}

TEST_CASE("scene configuration validation", "[synthetic]") {
  SyntheticSceneConfig cfg = small_scene();
  cfg.normal_targets = 0;
  REQUIRE_THROWS_AS(generate_synthetic(cfg), ConfigError);
  cfg = small_scene();
  cfg.normal_speed_min = -1.0;
  REQUIRE_THROWS_AS(generate_synthetic(cfg), ConfigError);
  cfg = small_scene();
  cfg.abnormal_targets = 2;
  cfg.anomaly_kinds.clear();
  REQUIRE_THROWS_AS(generate_synthetic(cfg), ConfigError);
  REQUIRE(parse_anomaly_kind("fast-motion") == AnomalyKind::fast_motion);
  REQUIRE_THROWS_AS(parse_anomaly_kind("slow-motion"), ConfigError);
}
