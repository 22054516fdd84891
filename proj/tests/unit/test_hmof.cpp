#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <vector>

#include "trifuse/hmof.hpp"
#include "trifuse/rng.hpp"

using namespace trifuse;

namespace {

FlowField uniform_flow(int w, int h, float u, float v) {
  FlowField flow;
  flow.width = w;
  flow.height = h;
  flow.vectors.assign(static_cast<std::size_t>(w) * h, FlowVector{u, v});
  return flow;
}

}  // namespace

TEST_CASE("zero flow puts all mass in the first cell", "[hmof]") {
  const FlowField flow = uniform_flow(8, 8, 0.0f, 0.0f);
  const HmofFeature f = compute_hmof(flow, {0, 0, 8, 8}, HmofConfig{8, 2.4});
  REQUIRE(f.bins.size() == 9);
  REQUIRE(f.bins[0] == 1.0);
  for (std::size_t i = 1; i < f.bins.size(); ++i) REQUIRE(f.bins[i] == 0.0);
}

TEST_CASE("magnitudes at or above the cap land in the overflow cell", "[hmof]") {
  const FlowField flow = uniform_flow(8, 8, 3.0f, 4.0f);  // magnitude 5
  const HmofFeature f = compute_hmof(flow, {0, 0, 8, 8}, HmofConfig{8, 2.4});
  REQUIRE(f.bins[8] == 1.0);
  REQUIRE(std::accumulate(f.bins.begin(), f.bins.end(), 0.0) == 1.0);
}

TEST_CASE("mixed magnitudes split between cells", "[hmof]") {
  // cell width 1.8 / 8 = 0.225: magnitude 0.1 -> cell 0, 1.0 -> cell 4
  FlowField flow = uniform_flow(10, 2, 0.1f, 0.0f);
  for (int x = 0; x < 10; ++x) flow.at(x, 1) = FlowVector{1.0f, 0.0f};
  const HmofFeature f = compute_hmof(flow, {0, 0, 10, 2}, HmofConfig{8, 1.8});
  REQUIRE(f.bins[0] == 0.5);
  REQUIRE(f.bins[4] == 0.5);
}

TEST_CASE("compute_hmof validates region and config", "[hmof]") {
  const FlowField flow = uniform_flow(8, 8, 0.0f, 0.0f);
  REQUIRE_THROWS_MATCHES(compute_hmof(flow, {0, 0, 0, 5}, HmofConfig{}),
                         DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("empty region")));
  REQUIRE_THROWS_AS(compute_hmof(flow, {4, 4, 8, 8}, HmofConfig{}), DataError);
  REQUIRE_THROWS_AS(compute_hmof(flow, {0, 0, 4, 4}, HmofConfig{1, 1.8}),
                    ConfigError);
  REQUIRE_THROWS_AS(compute_hmof(flow, {0, 0, 4, 4}, HmofConfig{8, 0.0}),
                    ConfigError);
}

TEST_CASE("histogram cells sum to one and rotation leaves them unchanged",
          "[hmof]") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 6 + static_cast<int>(rng.uniform_int(0, 10));
    const int h = 6 + static_cast<int>(rng.uniform_int(0, 10));
    FlowField flow;
    flow.width = w;
    flow.height = h;
    flow.vectors.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : flow.vectors) {
      v.u = static_cast<float>(rng.uniform(-3.0, 3.0));
      v.v = static_cast<float>(rng.uniform(-3.0, 3.0));
    }
    FlowField rotated = flow;
    for (auto& v : rotated.vectors) v = FlowVector{-v.v, v.u};

    const BoundingBox box{1, 1, w - 2, h - 2};
    const HmofConfig cfg{8, 1.8};
    const HmofFeature f = compute_hmof(flow, box, cfg);
    const HmofFeature g = compute_hmof(rotated, box, cfg);

    double sum = 0.0;
    for (const double b : f.bins) {
      REQUIRE(b >= 0.0);
      REQUIRE(b <= 1.0);
      sum += b;
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(f.bins == g.bins);  // magnitude-only feature
  }
}
