// Command-line driver for the three-branch anomaly scoring pipeline.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "trifuse/trifuse.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string preset;
  std::string config_path;
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts, bool needs_data,
                      bool needs_out) {
  cmd->add_option("--preset", opts.preset, "Configuration preset (umn or ped2)");
  cmd->add_option("--config", opts.config_path,
                  "Key-value configuration file applied on top of the preset");
  auto* data = cmd->add_option("--data", opts.data, "Dataset root directory");
  auto* out = cmd->add_option("--out", opts.out, "Output directory");
  auto* seed = cmd->add_option("--seed", opts.seed,
                               "Master seed override (pipeline and scene)");
  seed->each([&opts](const std::string&) { opts.seed_given = true; });
  if (needs_data) data->required();
  if (needs_out) out->required();
}

trifuse::FullConfig assemble_config(const CommonOptions& opts) {
  trifuse::FullConfig cfg;
  if (!opts.preset.empty()) {
    cfg.pipeline = trifuse::preset_by_name(opts.preset);
  }
  if (!opts.config_path.empty()) {
    trifuse::apply_config_file(cfg, opts.config_path);
  }
  if (opts.seed_given) {
    cfg.pipeline.seed = opts.seed;
    cfg.scene.seed = opts.seed;
  }
  trifuse::finalize(cfg.pipeline);
  return cfg;
}

void write_plot_data(const trifuse::PipelineSummary& summary, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw trifuse::DataError("cannot open " + path.string() + " for writing");
  out << "# frame-level ROC (fpr tpr)\n";
  for (const auto& p : summary.frame_curve.points) {
    out << trifuse::detail::format_double(p.fpr) << ' '
        << trifuse::detail::format_double(p.tpr) << '\n';
  }
  out << "\n# pixel-level ROC (fpr tpr)\n";
  for (const auto& p : summary.pixel_curve.points) {
    out << trifuse::detail::format_double(p.fpr) << ' '
        << trifuse::detail::format_double(p.tpr) << '\n';
  }
  if (!out.flush()) throw trifuse::DataError("write failed: " + path.string());
}

void print_summary(const trifuse::PipelineSummary& summary) {
  std::cout << "frames: " << summary.test_frames
            << " (abnormal " << summary.abnormal_frames << "), records: "
            << summary.record_count << '\n'
            << "frame-level  AUC " << summary.frame_auc << "  EER "
            << summary.frame_eer << '\n'
            << "pixel-level  AUC " << summary.pixel_auc << "  EER "
            << summary.pixel_eer << '\n'
            << "branch frame AUC  object " << summary.object_frame_auc
            << "  action " << summary.action_frame_auc << "  motion "
            << summary.motion_frame_auc << '\n';
}

int run_gen(const CommonOptions& opts) {
  trifuse::FullConfig cfg = assemble_config(opts);
  trifuse::validate(cfg.scene);
  const trifuse::Dataset dataset = trifuse::generate_synthetic(cfg.scene);
  trifuse::save_dataset(dataset, opts.out);
  std::cout << "wrote synthetic dataset to " << opts.out << " ("
            << dataset.train_frame_count << "+" << dataset.test_frame_count
            << " frames, " << dataset.testing.detections.size()
            << " test detections)\n";
  return 0;
}

int run_train(const CommonOptions& opts) {
  trifuse::FullConfig cfg = assemble_config(opts);
  const trifuse::Dataset dataset = trifuse::load_dataset(opts.data);
  fs::create_directories(opts.out);
  const trifuse::TrainedModels models =
      trifuse::train_models(dataset, cfg.pipeline);
  trifuse::save_label_list(models.label_list, fs::path(opts.out) / "label_list.txt");
  trifuse::save_action_list(models.action_list,
                            fs::path(opts.out) / "action_list.txt");
  trifuse::save_autoencoder(models.autoencoder,
                            fs::path(opts.out) / "autoencoder.tfae");
  trifuse::save_gmm(models.gmm, fs::path(opts.out) / "gmm.tfgm");
  std::cout << "trained on " << dataset.training.detections.size()
            << " detections; label list " << models.label_list.labels.size()
            << " entries, action list " << models.action_list.actions.size()
            << " entries\n";
  return 0;
}

int run_score(const CommonOptions& opts) {
  trifuse::FullConfig cfg = assemble_config(opts);
  const trifuse::Dataset dataset = trifuse::load_dataset(opts.data);
  trifuse::TrainedModels models;
  models.label_list = trifuse::load_label_list(fs::path(opts.out) / "label_list.txt");
  models.action_list =
      trifuse::load_action_list(fs::path(opts.out) / "action_list.txt");
  models.autoencoder =
      trifuse::load_autoencoder(fs::path(opts.out) / "autoencoder.tfae");
  models.gmm = trifuse::load_gmm(fs::path(opts.out) / "gmm.tfgm");
  const trifuse::ScoringResult scoring =
      trifuse::score_dataset(dataset, cfg.pipeline, models);
  trifuse::write_results(scoring.records, fs::path(opts.out) / "results.tsv");
  std::cout << "scored " << scoring.records.size() << " records\n";
  return 0;
}

int run_eval(const CommonOptions& opts, const std::string& plot_path) {
  const trifuse::Dataset dataset = trifuse::load_dataset(opts.data);
  const auto records = trifuse::read_results(fs::path(opts.out) / "results.tsv");
  const trifuse::PipelineSummary summary =
      trifuse::evaluate_results(records, dataset.testing.masks);
  trifuse::write_roc_points(summary.frame_curve, fs::path(opts.out) / "roc_frame.txt");
  trifuse::write_roc_points(summary.pixel_curve, fs::path(opts.out) / "roc_pixel.txt");
  trifuse::write_threshold_table(summary.frame_curve,
                                 fs::path(opts.out) / "thresholds_frame.txt");
  trifuse::write_threshold_table(summary.pixel_curve,
                                 fs::path(opts.out) / "thresholds_pixel.txt");
  trifuse::write_summary(summary, fs::path(opts.out) / "summary.txt");
  if (!plot_path.empty()) write_plot_data(summary, plot_path);
  print_summary(summary);
  return 0;
}

int run_all(const CommonOptions& opts) {
  trifuse::FullConfig cfg = assemble_config(opts);
  const trifuse::PipelineSummary summary =
      trifuse::run_pipeline(cfg.pipeline, opts.data, opts.out);
  print_summary(summary);
  return 0;
}

int run_explain(const CommonOptions& opts) {
  const auto records = trifuse::read_results(fs::path(opts.out) / "results.tsv");
  for (const auto& r : records) {
    std::cout << "frame=" << r.frame_index << " target=" << r.target_id
              << " score=" << trifuse::detail::format_double(r.fused_normalized)
              << " decision=" << (r.abnormal ? "abnormal" : "normal")
              << " object='" << r.explanation.object_label << "' action='"
              << r.explanation.action_label << "' motion='"
              << r.explanation.motion_flag << "'\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trifuse: three-branch (object/action/motion) video anomaly scoring"};
  app.require_subcommand(1);

  CommonOptions gen_opts, train_opts, score_opts, eval_opts, run_opts, explain_opts;
  std::string plot_path;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  add_common_flags(gen, gen_opts, false, true);
  CLI::App* train =
      app.add_subcommand("train", "Build whitelists and train the motion models");
  add_common_flags(train, train_opts, true, true);
  CLI::App* score =
      app.add_subcommand("score", "Score the test split with trained models");
  add_common_flags(score, score_opts, true, true);
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a results file (ROC, AUC, EER)");
  add_common_flags(eval_cmd, eval_opts, true, true);
  eval_cmd->add_option("--plot-data", plot_path,
                       "Also write a combined ROC plot-data file");
  CLI::App* run = app.add_subcommand("run", "Train, score and evaluate in one go");
  add_common_flags(run, run_opts, true, true);
  CLI::App* explain =
      app.add_subcommand("explain", "Dump per-target explanations from results");
  add_common_flags(explain, explain_opts, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return run_gen(gen_opts);
    if (*train) return run_train(train_opts);
    if (*score) return run_score(score_opts);
    if (*eval_cmd) return run_eval(eval_opts, plot_path);
    if (*run) return run_all(run_opts);
    if (*explain) return run_explain(explain_opts);
  } catch (const trifuse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const trifuse::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const trifuse::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
