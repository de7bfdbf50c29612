#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "packscope/error.hpp"

namespace {

using namespace packscope;
namespace fs = std::filesystem;

void print_metrics(const Metrics& m) {
  std::printf("accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f fpr=%.4f fnr=%.4f\n", m.accuracy, m.precision,
              m.recall, m.f1, m.fpr, m.fnr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"packscope: packed-executable detection from byte-plot Gabor features"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::string width;
  std::string model_kind;
  std::size_t runs = 1;
  std::string split;
  std::string corpus;
  std::string features;
  std::string model;
  std::string reports;

  app.add_option("--config", config_path, "JSON run configuration; flags override it");
  auto* o_seed = app.add_option("--seed", seed, "Master seed");
  auto* o_out = app.add_option("--out", out, "Output directory of the command");
  auto* o_width = app.add_option("--width", width, "Byte-plot width: adaptive or fixed:N");
  auto* o_kind = app.add_option("--model-kind", model_kind, "knn, logreg, rf, mlp or svm");
  auto* o_runs = app.add_option("--runs", runs, "Training repetitions with derived seeds");
  auto* o_split = app.add_option("--split", split, "train, val, test or holdout");
  auto* o_corpus = app.add_option("--corpus", corpus, "Corpus directory holding manifest.jsonl");
  auto* o_features = app.add_option("--features", features, "Feature file (.psfa or .csv)");
  auto* o_model = app.add_option("--model", model, "Model file");
  auto* o_reports = app.add_option("--reports", reports, "Reports directory");

  auto* gen = app.add_subcommand("corpus-gen", "Generate the synthetic corpus and its manifest");
  auto* img = app.add_subcommand("image-export", "Export byte plots as grayscale PNGs");
  std::size_t size = 224;
  auto* o_size = img->add_option("--size", size, "Square output size, 0 for the native byte plot");
  auto* feat = app.add_subcommand("features", "Extract Gabor jets to features.psfa and features.csv");
  auto* train = app.add_subcommand("train", "Train a classifier on the train split");
  auto* eval = app.add_subcommand("eval", "Evaluate a model on one split, or score a predictions CSV");
  std::string predictions;
  std::string name = "external";
  eval->add_option("--predictions", predictions, "Predictions CSV (id,label,pred,score) to evaluate instead");
  eval->add_option("--name", name, "Model name for --predictions reports");
  auto* scan = app.add_subcommand("scan", "Classify files as packed or non-packed");
  std::vector<std::string> files;
  scan->add_option("files", files, "Files to scan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_run_config(config_path);
    if (*o_seed) cfg.seed = seed;
    if (*o_width) cfg.width = WidthPolicy::parse(width);
    if (*o_kind) cfg.train.kind = parse_model_kind(model_kind);
    if (*o_runs) cfg.runs = runs;
    if (*o_split) cfg.eval_split = parse_split(split);
    if (*o_corpus) cfg.paths.corpus = corpus;
    if (*o_features) cfg.paths.features = features;
    if (*o_model) cfg.paths.model = model;
    if (*o_reports) cfg.paths.reports = reports;
    if (*o_size) cfg.image_export_size = size;

    if (gen->parsed()) {
      if (*o_out) cfg.paths.corpus = out;
      const auto manifest = cli::cmd_corpus_gen(cfg);
      std::printf("wrote %zu samples to %s\n", manifest.samples.size(), cfg.paths.corpus.string().c_str());
    } else if (img->parsed()) {
      if (*o_out) cfg.paths.images = out;
      cli::cmd_image_export(cfg);
      std::printf("wrote images to %s\n", cfg.paths.images.string().c_str());
    } else if (feat->parsed()) {
      if (*o_out) cfg.paths.features = fs::path(out) / "features.psfa";
      cli::cmd_features(cfg, std::cerr);
      std::printf("wrote %s\n", cfg.paths.features.string().c_str());
    } else if (train->parsed()) {
      if (*o_out) {
        cfg.paths.model = fs::path(out) / "model.psmd";
        cfg.paths.reports = out;
      }
      const auto outcome = cli::cmd_train(cfg);
      std::printf("wrote %s\n", cfg.paths.model.string().c_str());
      if (outcome.report) {
        for (const auto& m : outcome.report->runs) print_metrics(m);
      }
    } else if (eval->parsed()) {
      if (*o_out) cfg.paths.reports = out;
      const auto metrics =
          predictions.empty() ? cli::cmd_eval(cfg) : cli::cmd_eval_predictions(cfg, predictions, name);
      print_metrics(metrics);
    } else if (scan->parsed()) {
      std::vector<fs::path> paths(files.begin(), files.end());
      return cli::cmd_scan(cfg, paths, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "packscope: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
