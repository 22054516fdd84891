// Acceptance suite: end-to-end checks of the scoring, training, fusion and
// evaluation stack against independent oracles and trend expectations.
// Prints one PASS/FAIL line per criterion; the exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "trifuse/trifuse.hpp"

namespace fs = std::filesystem;
using namespace trifuse;

namespace {

struct CriterionFailure {
  std::string reason;
};

void expect(bool condition, const std::string& reason) {
  if (!condition) throw CriterionFailure{reason};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  expect(static_cast<bool>(in), "cannot open " + p.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// --------------------------------------------------------------- criterion 1

std::string normalization_suite() {
  Rng rng(101);
  int degenerate_checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 62));
    if (trial % 10 == 0) {
      // degenerate list: every element equal
      const double v = rng.uniform(-100.0, 100.0);
      const std::vector<double> constant(static_cast<std::size_t>(n), v);
      for (const double y : min_max_normalize(constant)) {
        expect(y == 0.5, "degenerate != 0.5");
      }
      for (const double y : min_max_invert_normalize(constant)) {
        expect(y == 0.5, "degenerate != 0.5");
      }
      ++degenerate_checked;
      continue;
    }
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(i)] = rng.uniform(-1000.0, 1000.0) + i * 1e-6;
    }
    const std::vector<double> fwd = min_max_normalize(scores);
    const std::vector<double> inv = min_max_invert_normalize(scores);

    std::size_t argmin = 0, argmax = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] < scores[argmin]) argmin = i;
      if (scores[i] > scores[argmax]) argmax = i;
    }
    expect(fwd[argmin] == 0.0, "min does not map to 0");
    expect(fwd[argmax] == 1.0, "max does not map to 1");
    expect(inv[argmin] == 1.0, "min does not invert to 1");
    expect(inv[argmax] == 0.0, "max does not invert to 0");
    for (std::size_t i = 0; i < scores.size(); ++i) {
      expect(fwd[i] >= 0.0 && fwd[i] <= 1.0, "output outside [0,1]");
      expect(inv[i] >= 0.0 && inv[i] <= 1.0, "inverted output outside [0,1]");
    }
    for (std::size_t i = 1; i < scores.size(); ++i) {
      const bool less = scores[i - 1] < scores[i];
      expect(less ? fwd[i - 1] < fwd[i] : fwd[i - 1] > fwd[i],
             "order not preserved");
      expect(less ? inv[i - 1] > inv[i] : inv[i - 1] < inv[i],
             "order not reversed");
    }
  }
  return "10000 lists, " + std::to_string(degenerate_checked) + " degenerate";
}

// --------------------------------------------------------------- criterion 2

std::string em_oracle() {
  Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_int(0, 195));
    const int dim = 1 + static_cast<int>(rng.uniform_int(0, 8));
    std::vector<std::vector<double>> data(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(dim)));
    for (auto& x : data) {
      for (double& v : x) v = rng.uniform(-10.0, 10.0);
    }
    GmmConfig cfg;
    cfg.components = 1;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const GmmModel model = fit_gmm(data, cfg);

    // closed-form MLE
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    for (const auto& x : data) {
      for (int d = 0; d < dim; ++d) {
        mean[static_cast<std::size_t>(d)] += x[static_cast<std::size_t>(d)];
      }
    }
    for (double& v : mean) v /= n;
    std::vector<double> variance(static_cast<std::size_t>(dim), 0.0);
    for (const auto& x : data) {
      for (int d = 0; d < dim; ++d) {
        const double diff = x[static_cast<std::size_t>(d)] - mean[static_cast<std::size_t>(d)];
        variance[static_cast<std::size_t>(d)] += diff * diff;
      }
    }
    for (double& v : variance) v = std::max(v / n, cfg.covariance_floor);

    const auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
    };
    for (int d = 0; d < dim; ++d) {
      const double em = rel(model.means[0][static_cast<std::size_t>(d)],
                            mean[static_cast<std::size_t>(d)]);
      const double ev = rel(model.variances[0][static_cast<std::size_t>(d)],
                            variance[static_cast<std::size_t>(d)]);
      worst = std::max({worst, em, ev});
      expect(em < 1e-8, "mean differs from closed-form MLE");
      expect(ev < 1e-8, "variance differs from closed-form MLE");
    }
    for (std::size_t i = 1; i < model.log_likelihood_history.size(); ++i) {
      expect(model.log_likelihood_history[i] >=
                 model.log_likelihood_history[i - 1] - 1e-9,
             "log-likelihood decreased");
    }
  }
  std::ostringstream oss;
  oss << "100 datasets, worst relative error " << worst;
  return oss.str();
}

// --------------------------------------------------------------- criterion 3

std::string gradient_check() {
  Rng rng(303);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    AutoencoderConfig cfg;  // default 9-4-9 stack
    cfg.seed = static_cast<std::uint64_t>(7000 + point);
    AutoencoderModel model = init_autoencoder(cfg);
    std::vector<double> theta = flatten_parameters(model);
    for (double& t : theta) t = rng.uniform(-0.5, 0.5);
    set_parameters(model, theta);

    std::vector<HmofFeature> data;
    const int samples = 3 + static_cast<int>(rng.uniform_int(0, 5));
    for (int s = 0; s < samples; ++s) {
      std::vector<double> bins(9);
      double sum = 0.0;
      for (double& b : bins) {
        b = rng.uniform(0.0, 1.0);
        sum += b;
      }
      for (double& b : bins) b /= sum;
      data.push_back(HmofFeature{bins});
    }

    const std::vector<double> analytic = loss_gradient(model, data);
    const double h = 1e-5;
    std::vector<double> numeric(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      std::vector<double> probe = theta;
      probe[i] = theta[i] + h;
      set_parameters(model, probe);
      const double up = batch_loss(model, data);
      probe[i] = theta[i] - h;
      set_parameters(model, probe);
      const double down = batch_loss(model, data);
      numeric[i] = (up - down) / (2.0 * h);
    }
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      na += analytic[i] * analytic[i];
      nb += numeric[i] * numeric[i];
    }
    const double rel = std::sqrt(diff) / std::max(std::sqrt(na), std::sqrt(nb));
    worst = std::max(worst, rel);
    expect(rel < 1e-5, "gradient mismatch above 1e-5");
  }
  std::ostringstream oss;
  oss << "20 parameter points, worst relative error " << worst;
  return oss.str();
}

// --------------------------------------------------------------- criterion 4

std::string auc_oracle() {
  // worked example first: exact value
  {
    const std::vector<FrameScore> frames{
        {0, 0.1, false}, {1, 0.4, false}, {2, 0.35, true}, {3, 0.8, true}};
    expect(auc(roc(frames)) == 0.75, "worked 4-sample example != 0.75");
  }
  Rng rng(404);
  double worst = 0.0;
  int evaluated = 0;
  while (evaluated < 1000) {
    const int n = 4 + static_cast<int>(rng.uniform_int(0, 496));
    std::vector<FrameScore> frames;
    int positives = 0;
    for (int i = 0; i < n; ++i) {
      FrameScore f;
      f.frame_index = i;
      f.score = rng.uniform() < 0.4
                    ? static_cast<double>(rng.uniform_int(0, 20)) / 20.0
                    : rng.uniform();
      f.gt_abnormal = rng.uniform() < 0.5;
      positives += f.gt_abnormal ? 1 : 0;
      frames.push_back(f);
    }
    if (positives == 0 || positives == n) continue;
    ++evaluated;

    double wins = 0.0;
    std::int64_t pairs = 0;
    for (const auto& p : frames) {
      if (!p.gt_abnormal) continue;
      for (const auto& q : frames) {
        if (q.gt_abnormal) continue;
        ++pairs;
        if (p.score > q.score) wins += 1.0;
        else if (p.score == q.score) wins += 0.5;
      }
    }
    const double oracle = wins / static_cast<double>(pairs);
    const double area = auc(roc(frames));
    worst = std::max(worst, std::abs(area - oracle));
    expect(std::abs(area - oracle) < 1e-9, "AUC differs from pairwise oracle");
  }
  std::ostringstream oss;
  oss << "1000 score sets, worst |diff| " << worst;
  return oss.str();
}

// --------------------------------------------------------------- criterion 5

std::string pixel_rule() {
  // unit cases on a 10x10 abnormal square (100 abnormal pixels)
  Mask gt;
  gt.width = 20;
  gt.height = 20;
  gt.pixels.assign(400, 0);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      gt.pixels[static_cast<std::size_t>(y) * 20 + x] = 255;
    }
  }
  expect(pixel_level_hit(std::vector<BoundingBox>{{0, 0, 10, 4}, {0, 4, 1, 1}}, gt),
         "41/100 should hit");
  expect(!pixel_level_hit(std::vector<BoundingBox>{{0, 0, 10, 4}}, gt),
         "40/100 should miss");
  expect(!pixel_level_hit(std::vector<BoundingBox>{{12, 12, 4, 4}}, gt),
         "0/100 should miss");

  Rng rng(505);
  int sets = 0;
  while (sets < 100) {
    const int w = 48, h = 36, frame_count = 24;
    std::map<int, Mask> masks;
    std::vector<FrameTargets> frames;
    int positives = 0, negatives = 0;
    for (int f = 0; f < frame_count; ++f) {
      Mask m;
      m.width = w;
      m.height = h;
      m.pixels.assign(static_cast<std::size_t>(w) * h, 0);
      if (rng.uniform() < 0.5) {
        const int side = 5 + static_cast<int>(rng.uniform_int(0, 8));
        const int x0 = static_cast<int>(rng.uniform_int(0, w - side));
        const int y0 = static_cast<int>(rng.uniform_int(0, h - side));
        for (int y = y0; y < y0 + side; ++y) {
          for (int x = x0; x < x0 + side; ++x) {
            m.pixels[static_cast<std::size_t>(y) * w + x] = 255;
          }
        }
        ++positives;
      } else {
        ++negatives;
      }
      masks.emplace(f, std::move(m));
      FrameTargets ft;
      ft.frame_index = f;
      const int targets = static_cast<int>(rng.uniform_int(0, 4));
      for (int t = 0; t < targets; ++t) {
        const int bw = 4 + static_cast<int>(rng.uniform_int(0, 10));
        const int bh = 4 + static_cast<int>(rng.uniform_int(0, 10));
        ft.targets.push_back(ScoredBox{
            {static_cast<int>(rng.uniform_int(0, w - bw)),
             static_cast<int>(rng.uniform_int(0, h - bh)), bw, bh},
            rng.uniform()});
      }
      frames.push_back(std::move(ft));
    }
    if (positives == 0 || negatives == 0) continue;
    ++sets;

    const RocCurve pixel = pixel_roc(frames, masks);
    for (const auto& point : pixel.points) {
      if (!std::isfinite(point.threshold)) continue;
      const double t = point.threshold;
      int frame_tp = 0, pixel_tp = 0;
      for (int f = 0; f < frame_count; ++f) {
        const Mask& m = masks.at(f);
        if (m.abnormal_count() == 0) continue;
        std::vector<BoundingBox> flagged;
        for (const auto& sb : frames[static_cast<std::size_t>(f)].targets) {
          if (sb.score > t) flagged.push_back(sb.box);
        }
        if (flagged.empty()) continue;
        ++frame_tp;
        if (pixel_level_hit(flagged, m)) ++pixel_tp;
      }
      expect(pixel_tp <= frame_tp, "pixel TPR above frame TPR");
      expect(std::abs(point.tpr - static_cast<double>(pixel_tp) / positives) < 1e-12,
             "pixel curve TPR mismatch with recount");
    }
  }
  return "unit cases + 100 random result sets";
}

// --------------------------------------------------------------- criterion 6

std::string fusion_dominance() {
  Rng rng(606);
  int records_checked = 0;
  int batches = 0;
  while (records_checked < 10000) {
    ++batches;
    const int n = 10 + static_cast<int>(rng.uniform_int(0, 30));
    std::vector<BranchScores> batch;
    for (int i = 0; i < n; ++i) {
      BranchScores b;
      b.target_id = "t" + std::to_string(i);
      b.frame_index = i;
      auto maybe = [&](double p) -> std::optional<ScorePair> {
        if (rng.uniform() < p) return ScorePair{0.0, rng.uniform()};
        return std::nullopt;
      };
      b.object = maybe(0.85);
      b.action = maybe(0.7);
      b.motion = maybe(0.7);
      if (!b.object && !b.action && !b.motion) {
        b.object = ScorePair{0.0, rng.uniform()};
      }
      batch.push_back(std::move(b));
    }
    FusionConfig cfg;
    cfg.object_weight = rng.uniform(0.05, 3.0);
    cfg.action_weight = rng.uniform(0.05, 3.0);
    cfg.motion_weight = rng.uniform(0.05, 3.0);
    cfg.decision_threshold = rng.uniform(0.05, 0.95);

    for (const auto& b : batch) {
      const double fused = fuse_raw(b, cfg);
      if (b.object) {
        expect(fused >= cfg.object_weight * b.object->normalized,
               "object branch suppressed");
      }
      if (b.action) {
        expect(fused >= cfg.action_weight * b.action->normalized,
               "action branch suppressed");
      }
      if (b.motion) {
        expect(fused >= cfg.motion_weight * b.motion->normalized,
               "motion branch suppressed");
      }
      ++records_checked;
    }

    FusionConfig rescaled = cfg;
    const double factor = rng.uniform(0.1, 10.0);
    rescaled.object_weight *= factor;
    rescaled.action_weight *= factor;
    rescaled.motion_weight *= factor;
    const auto base = fuse_batch(batch, cfg);
    const auto moved = fuse_batch(batch, rescaled);
    for (std::size_t i = 0; i < base.size(); ++i) {
      expect(base[i].abnormal == moved[i].abnormal,
             "decision set changed under uniform weight scaling");
    }
  }
  return std::to_string(records_checked) + " records in " +
         std::to_string(batches) + " batches";
}

// --------------------------------------------------------------- criterion 7

std::string trend_reproduction(const fs::path& tmp) {
  const SyntheticSceneConfig scene;  // defaults stage all three anomaly kinds
  const fs::path data = tmp / "trend_data";
  save_dataset(generate_synthetic(scene), data);

  PipelineConfig cfg = preset_umn();
  cfg.seed = 0;
  finalize(cfg);
  const PipelineSummary s = run_pipeline(cfg, data, tmp / "trend_out");

  std::ostringstream oss;
  oss << "fused " << s.frame_auc << " vs object " << s.object_frame_auc
      << ", action " << s.action_frame_auc << ", motion " << s.motion_frame_auc;
  expect(s.frame_auc >= s.object_frame_auc - 0.02,
         "fused below object - 0.02: " + oss.str());
  expect(s.frame_auc >= s.action_frame_auc - 0.02,
         "fused below action - 0.02: " + oss.str());
  expect(s.frame_auc >= s.motion_frame_auc - 0.02,
         "fused below motion - 0.02: " + oss.str());
  expect(s.frame_auc >= 0.95, "fused AUC below 0.95: " + oss.str());
  return oss.str();
}

// --------------------------------------------------------------- criterion 8

std::string determinism(const fs::path& tmp) {
  SyntheticSceneConfig scene;
  scene.frames_per_split = 80;
  scene.normal_targets = 4;
  scene.seed = 7;
  const fs::path data = tmp / "det_data";
  save_dataset(generate_synthetic(scene), data);

  PipelineConfig cfg = preset_umn();
  cfg.seed = 42;
  finalize(cfg);
  run_pipeline(cfg, data, tmp / "det_a");
  run_pipeline(cfg, data, tmp / "det_b");

  const std::vector<std::string> artifacts{
      "label_list.txt", "action_list.txt", "autoencoder.tfae", "gmm.tfgm",
      "results.tsv",    "roc_frame.txt",   "roc_pixel.txt",
      "thresholds_frame.txt", "thresholds_pixel.txt", "summary.txt"};
  for (const auto& name : artifacts) {
    expect(read_file(tmp / "det_a" / name) == read_file(tmp / "det_b" / name),
           name + " differs between identical runs");
  }
  return std::to_string(artifacts.size()) + " artifacts byte-identical";
}

// --------------------------------------------------------------- criterion 9

std::string format_round_trips(const fs::path& tmp) {
  SyntheticSceneConfig scene;
  scene.frames_per_split = 40;
  scene.normal_targets = 3;
  scene.abnormal_targets = 2;
  scene.seed = 5;
  const Dataset ds = generate_synthetic(scene);
  const fs::path data = tmp / "rt_data";
  save_dataset(ds, data);
  expect(load_dataset(data) == ds, "dataset save/load not identity");

  AutoencoderConfig ae_cfg;
  ae_cfg.seed = 9;
  ae_cfg.epochs = 3;
  std::vector<HmofFeature> features;
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> bins(9, 0.0);
    bins[static_cast<std::size_t>(rng.uniform_int(0, 8))] = 1.0;
    features.push_back(HmofFeature{bins});
  }
  const AutoencoderModel ae = train_autoencoder(features, ae_cfg);
  save_autoencoder(ae, tmp / "rt.tfae");
  const AutoencoderModel ae2 = load_autoencoder(tmp / "rt.tfae");
  const auto fa = flatten_parameters(ae);
  const auto fb = flatten_parameters(ae2);
  expect(fa.size() == fb.size(), "autoencoder parameter count changed");
  for (std::size_t i = 0; i < fa.size(); ++i) {
    expect(std::memcmp(&fa[i], &fb[i], sizeof(double)) == 0,
           "autoencoder parameters not bit-identical");
  }

  std::vector<std::vector<double>> data_points;
  for (int i = 0; i < 50; ++i) data_points.push_back({rng.normal(), rng.normal()});
  GmmConfig gmm_cfg;
  gmm_cfg.components = 3;
  const GmmModel gmm = fit_gmm(data_points, gmm_cfg);
  save_gmm(gmm, tmp / "rt.tfgm");
  const GmmModel gmm2 = load_gmm(tmp / "rt.tfgm");
  auto same_bits = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  };
  expect(same_bits(gmm.weights, gmm2.weights), "gmm weights not bit-identical");
  for (int j = 0; j < gmm.component_count(); ++j) {
    expect(same_bits(gmm.means[static_cast<std::size_t>(j)],
                     gmm2.means[static_cast<std::size_t>(j)]),
           "gmm means not bit-identical");
    expect(same_bits(gmm.variances[static_cast<std::size_t>(j)],
                     gmm2.variances[static_cast<std::size_t>(j)]),
           "gmm variances not bit-identical");
  }
  return "dataset identity + bit-identical model reloads";
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const fs::path tmp = "acceptance_tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  const std::vector<Criterion> criteria{
      {1, "normalization maps min/max/order/degenerate exactly", 5.0,
       normalization_suite},
      {2, "EM with k=1 matches the closed-form Gaussian MLE", 30.0, em_oracle},
      {3, "autoencoder gradient matches central finite differences", 10.0,
       gradient_check},
      {4, "trapezoidal AUC equals the pairwise ranking oracle", 30.0, auc_oracle},
      {5, "pixel-level 40% rule and TPR ordering", 60.0, pixel_rule},
      {6, "fusion dominance and weight-scaling invariance", 30.0,
       fusion_dominance},
      {7, "fused AUC beats every branch on the three-anomaly scene", 60.0,
       [&] { return trend_reproduction(tmp); }},
      {8, "identical runs produce byte-identical artifacts", 120.0,
       [&] { return determinism(tmp); }},
      {9, "dataset and model formats round-trip exactly", 30.0,
       [&] { return format_round_trips(tmp); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const CriterionFailure& f) {
      ok = false;
      detail = f.reason;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && seconds > c.budget_seconds) {
      ok = false;
      detail = "exceeded time budget of " + std::to_string(c.budget_seconds) + "s";
    }
    std::ostringstream line;
    line << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name
         << " (" << detail << ", " << std::fixed << std::setprecision(2)
         << seconds << "s)";
    std::cout << line.str() << std::endl;
    failures += ok ? 0 : 1;
  }
  if (failures == 0) {
    std::cout << "all 9 acceptance criteria passed" << std::endl;
  } else {
    std::cout << failures << " acceptance criteria FAILED" << std::endl;
  }
  return failures;
}
