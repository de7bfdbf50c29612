#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "packscope/byteplot.hpp"
#include "packscope/classifiers.hpp"
#include "packscope/dataset.hpp"
#include "packscope/eval.hpp"
#include "packscope/gabor.hpp"

namespace packscope::cli {

struct Paths {
  std::filesystem::path corpus = "corpus";
  std::filesystem::path images = "images";
  std::filesystem::path features = "features/features.psfa";
  std::filesystem::path model = "model/model.psmd";
  std::filesystem::path reports = "reports";
};

struct RunConfig {
  std::uint64_t seed = 1;
  Paths paths;
  CorpusConfig corpus;
  SplitFractions split;
  WidthPolicy width = WidthPolicy::adaptive();
  GaborBank bank;
  TrainConfig train;
  std::size_t image_export_size = 224;  ///< 0 keeps the native byte-plot size
  std::size_t runs = 1;
  Split eval_split = Split::Test;

  /// Throws ConfigError.
  void validate() const;
};

/// Overlays a JSON document on the defaults. Unknown keys are rejected.
/// Throws ConfigError.
[[nodiscard]] RunConfig parse_run_config(std::string_view json_text, RunConfig base = {});
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Seed used for run r of a --runs N sweep; run 0 uses the base seed.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t seed, std::size_t run) noexcept;

/// build_corpus + stratified_split into paths.corpus.
Manifest cmd_corpus_gen(const RunConfig& config);

/// One PNG per sample under paths.images, named <id>.png.
void cmd_image_export(const RunConfig& config);

/// Writes paths.features (archive) and the same path with a .csv extension.
/// Per-sample failures go to `diag`.
void cmd_features(const RunConfig& config, std::ostream& diag);

struct TrainOutcome {
  TrainedModel model;               ///< run 0, the one saved to paths.model
  std::optional<RunReport> report;  ///< test-split metrics per run, if a test split exists
};

/// Trains on the manifest's train split after over-sampling, once per run
/// with run_seed(seed, r). Saves run 0 to paths.model and the report to
/// paths.reports/train_metrics.csv.
TrainOutcome cmd_train(const RunConfig& config);

/// Scores `eval_split` rows and writes predictions, confusion, metrics and
/// confidence reports under paths.reports, suffixed with the split name.
Metrics cmd_eval(const RunConfig& config);

/// Metrics from an externally produced predictions CSV (id,label,pred,score).
/// Reports are written under paths.reports, suffixed with the file's stem.
Metrics cmd_eval_predictions(const RunConfig& config, const std::filesystem::path& predictions,
                          std::string_view model_name);

/// Prints `path<TAB>verdict<TAB>confidence` per file.
/// Returns 0 if every file is non-packed, 2 if any is packed, 1 on any error.
int cmd_scan(const RunConfig& config, const std::vector<std::filesystem::path>& files, std::ostream& out,
             std::ostream& diag);

}  // namespace packscope::cli
