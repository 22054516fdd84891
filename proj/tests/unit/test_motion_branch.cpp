#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "trifuse/motion_branch.hpp"
#include "trifuse/rng.hpp"

using namespace trifuse;

namespace {

GmmModel standard_normal_1d() {
  GmmModel m;
  m.weights = {1.0};
  m.means = {{0.0}};
  m.variances = {{1.0}};
  return m;
}

}  // namespace

TEST_CASE("motion scores invert the likelihood ordering", "[motion]") {
  const GmmModel model = standard_normal_1d();
  // near the mode vs far in the tail: the likely feature scores 0, the
  // unlikely one scores 1
  const std::vector<MotionEntry> entries{{"a", 0, {0.5}}, {"b", 1, {4.0}}};
  const auto scored = score_motion_batch(entries, model);
  REQUIRE(scored[0].raw > scored[1].raw);
  REQUIRE(scored[0].normalized == 0.0);
  REQUIRE(scored[1].normalized == 1.0);
}

TEST_CASE("equal likelihoods degenerate to the midpoint", "[motion]") {
  const GmmModel model = standard_normal_1d();
  const std::vector<MotionEntry> entries{{"a", 0, {1.0}}, {"b", 1, {-1.0}}};
  const auto scored = score_motion_batch(entries, model);
  REQUIRE(scored[0].raw == scored[1].raw);  // symmetric density
  REQUIRE(scored[0].normalized == 0.5);
  REQUIRE(scored[1].normalized == 0.5);
}

TEST_CASE("a far outlier gets the maximal normalized score", "[motion]") {
  Rng rng(3);
  std::vector<std::vector<double>> training;
  for (int i = 0; i < 50; ++i) {
    training.push_back({0.5 + 0.01 * rng.normal(), 0.5 + 0.01 * rng.normal()});
  }
  GmmConfig cfg;
  cfg.components = 1;
  const GmmModel model = fit_gmm(training, cfg);

  const std::vector<MotionEntry> entries{
      {"in-1", 0, {0.5, 0.5}},
      {"in-2", 1, {0.51, 0.49}},
      {"outlier", 2, {50.0, -50.0}},
  };
  const auto scored = score_motion_batch(entries, model);
  REQUIRE(scored[2].normalized == 1.0);
  REQUIRE(scored[0].normalized < 0.01);
  REQUIRE(scored[1].normalized < 0.01);
}

TEST_CASE("normalized score is monotone non-increasing in raw likelihood",
          "[motion]") {
  Rng rng(17);
  GmmModel model;
  model.weights = {0.6, 0.4};
  model.means = {{0.0, 0.0}, {2.0, 2.0}};
  model.variances = {{1.0, 1.0}, {0.5, 0.5}};
  std::vector<MotionEntry> entries;
  for (int i = 0; i < 200; ++i) {
    entries.push_back({"t" + std::to_string(i), i,
                       {rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)}});
  }
  auto scored = score_motion_batch(entries, model);
  std::sort(scored.begin(), scored.end(),
            [](const ScoredTarget& a, const ScoredTarget& b) { return a.raw < b.raw; });
  for (std::size_t i = 1; i < scored.size(); ++i) {
    REQUIRE(scored[i].normalized <= scored[i - 1].normalized);
  }
}

TEST_CASE("motion feature modes", "[motion]") {
  const AutoencoderModel ae = init_autoencoder(AutoencoderConfig{});
  HmofFeature f;
  f.bins = {0.1, 0.2, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05, 0.0};

  REQUIRE(motion_feature(ae, f, MotionFeatureMode::raw) == f.bins);
  REQUIRE(motion_feature(ae, f, MotionFeatureMode::reconstructed) ==
          reconstruct(ae, f.bins));
  REQUIRE(motion_feature(ae, f, MotionFeatureMode::latent).size() == 4);

  REQUIRE(parse_motion_feature_mode("raw") == MotionFeatureMode::raw);
  REQUIRE(parse_motion_feature_mode("latent") == MotionFeatureMode::latent);
  REQUIRE(parse_motion_feature_mode("reconstructed") ==
          MotionFeatureMode::reconstructed);
  REQUIRE_THROWS_AS(parse_motion_feature_mode("identity"), ConfigError);
}
