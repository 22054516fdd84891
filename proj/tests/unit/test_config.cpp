#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "trifuse/config.hpp"

using namespace trifuse;

TEST_CASE("umn preset pins the crowd-scene hyperparameters", "[config]") {
  PipelineConfig cfg = preset_umn();
  finalize(cfg);
  REQUIRE(cfg.object_confidence_threshold == 0.95);
  REQUIRE(cfg.action_confidence_threshold == 0.99);
  REQUIRE(cfg.hmof.magnitude_cap == 1.8);
  REQUIRE(cfg.hmof.bins == 8);
  REQUIRE(cfg.segment_length == 5);
  REQUIRE(cfg.fusion.object_weight == 1.0);
  REQUIRE(cfg.fusion.action_weight == 1.5);
  REQUIRE(cfg.fusion.motion_weight == 1.5);
  REQUIRE(cfg.autoencoder.layer_widths == std::vector<int>{9, 4, 9});
}

TEST_CASE("ped2 preset pins the walkway-scene hyperparameters", "[config]") {
  PipelineConfig cfg = preset_ped2();
  finalize(cfg);
  REQUIRE(cfg.object_confidence_threshold == 0.95);
  REQUIRE(cfg.action_confidence_threshold == 0.99);
  REQUIRE(cfg.hmof.magnitude_cap == 2.4);
  REQUIRE(cfg.hmof.bins == 8);
  REQUIRE(cfg.segment_length == 5);
  REQUIRE(cfg.fusion.object_weight == 1.0);
  REQUIRE(cfg.fusion.action_weight == 1.0);
  REQUIRE(cfg.fusion.motion_weight == 1.0);
}

TEST_CASE("unknown presets are rejected", "[config]") {
  REQUIRE_THROWS_AS(preset_by_name("avenue"), ConfigError);
}

TEST_CASE("config files override individual keys", "[config]") {
  TempDir dir("config_apply");
  spit(dir.file("run.cfg"),
       "# overrides\n"
       "pipeline.seed = 1234\n"
       "object.confidence_threshold = 0.9\n"
       "hmof.bins = 12\n"
       "hmof.magnitude_cap = 2.0\n"
       "autoencoder.hidden_widths = 6, 4, 6\n"
       "gmm.components = 3\n"
       "motion.feature_mode = latent\n"
       "fusion.missing_branch_policy = zero\n"
       "scene.frames = 80\n"
       "scene.anomaly_kinds = fast-motion, novel-object\n");
  FullConfig cfg;
  apply_config_file(cfg, dir.file("run.cfg"));
  finalize(cfg.pipeline);
  REQUIRE(cfg.pipeline.seed == 1234);
  REQUIRE(cfg.pipeline.object_confidence_threshold == 0.9);
  REQUIRE(cfg.pipeline.hmof.bins == 12);
  REQUIRE(cfg.pipeline.autoencoder.layer_widths ==
          std::vector<int>{13, 6, 4, 6, 13});
  REQUIRE(cfg.pipeline.gmm.components == 3);
  REQUIRE(cfg.pipeline.motion_feature_mode == MotionFeatureMode::latent);
  REQUIRE(cfg.pipeline.fusion.missing_branch == MissingBranchPolicy::zero);
  REQUIRE(cfg.scene.frames_per_split == 80);
  REQUIRE(cfg.scene.anomaly_kinds ==
          std::vector<AnomalyKind>{AnomalyKind::fast_motion,
                                   AnomalyKind::novel_object});
}

TEST_CASE("unknown config keys are hard errors", "[config]") {
  TempDir dir("config_unknown");
  spit(dir.file("bad.cfg"), "hmof.bin = 8\n");
  FullConfig cfg;
  REQUIRE_THROWS_MATCHES(apply_config_file(cfg, dir.file("bad.cfg")), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("hmof.bin")));
}

TEST_CASE("malformed config values are rejected with their line", "[config]") {
  TempDir dir("config_malformed");
  spit(dir.file("bad.cfg"), "pipeline.seed = 12\nhmof.bins = eight\n");
  FullConfig cfg;
  try {
    apply_config_file(cfg, dir.file("bad.cfg"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("line 2") != std::string::npos);
  }
  spit(dir.file("noeq.cfg"), "pipeline.seed\n");
  REQUIRE_THROWS_AS(apply_config_file(cfg, dir.file("noeq.cfg")), DataError);
}

TEST_CASE("finalize validates derived settings", "[config]") {
  PipelineConfig cfg = preset_umn();
  cfg.object_confidence_threshold = 1.2;
  REQUIRE_THROWS_AS(finalize(cfg), ConfigError);

  cfg = preset_umn();
  cfg.autoencoder_hidden_widths = {6, 4};  // not symmetric
  REQUIRE_THROWS_AS(finalize(cfg), ConfigError);

  cfg = preset_umn();
  cfg.fusion.object_weight = 0.0;
  cfg.fusion.action_weight = 0.0;
  cfg.fusion.motion_weight = 0.0;
  REQUIRE_THROWS_AS(finalize(cfg), ConfigError);

  cfg = preset_umn();
  cfg.segment_length = 0;
  REQUIRE_THROWS_AS(finalize(cfg), ConfigError);
}

TEST_CASE("stage seeds derive from the master seed", "[config]") {
  PipelineConfig a = preset_umn();
  a.seed = 1;
  finalize(a);
  PipelineConfig b = preset_umn();
  b.seed = 2;
  finalize(b);
  REQUIRE(a.autoencoder.seed != b.autoencoder.seed);
  REQUIRE(a.gmm.seed != b.gmm.seed);
  REQUIRE(a.autoencoder.seed != a.gmm.seed);

  PipelineConfig c = preset_umn();
  c.seed = 1;
  finalize(c);
  REQUIRE(c.autoencoder.seed == a.autoencoder.seed);
  REQUIRE(c.gmm.seed == a.gmm.seed);
}
