#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace packscope {

/// Positive class is Packed (1).
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct LabelPrediction {
  int label = 0;
  int pred = 0;
};

/// Throws EmptyInput, or NonBinaryValue for anything other than 0/1.
[[nodiscard]] ConfusionMatrix confusion_from_predictions(std::span<const LabelPrediction> rows);

/// A ratio with a zero denominator is reported as 0 and flagged undefined.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;

  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  bool fpr_undefined = false;
  bool fnr_undefined = false;

  [[nodiscard]] bool any_undefined() const noexcept {
    return precision_undefined || recall_undefined || f1_undefined || fpr_undefined || fnr_undefined;
  }
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

inline constexpr std::array<std::string_view, 6> kMetricNames{"accuracy", "precision", "recall", "f1", "fpr", "fnr"};

/// Metric values in kMetricNames order.
[[nodiscard]] std::array<double, 6> metric_values(const Metrics& m) noexcept;

/// Throws EmptyMatrix when total() == 0.
[[nodiscard]] Metrics compute_metrics(const ConfusionMatrix& cm);

/// Mean, sample standard deviation (n - 1) and 95% half-width 1.96 * sd / sqrt(n)
/// per metric. With one run the dispersion fields are 0.
struct RunReport {
  std::vector<Metrics> runs;
  std::array<double, 6> mean{};
  std::array<double, 6> stddev{};
  std::array<double, 6> ci95_half_width{};
};

/// Throws EmptyInput.
[[nodiscard]] RunReport aggregate_runs(std::span<const Metrics> runs);

/// `model,run,accuracy,precision,recall,f1,fpr,fnr`, one row per run, then
/// aggregate rows `model,MEAN±STD,...` and `model,MEAN±CI95,...`.
[[nodiscard]] std::string format_metrics_report(std::string_view model, const RunReport& report);

/// Per-run rows of a metrics report (aggregate rows are skipped).
[[nodiscard]] std::vector<Metrics> parse_metrics_report(std::string_view text);

struct ScoredLabel {
  int label = 0;
  double score = 0.0;
};

struct ConfidenceBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
};

/// Buckets are [edge_i, edge_{i+1}) with the last one closed. A row is correct
/// when (score >= 0.5) matches its label. Scores outside the edges are not
/// counted. Throws ScoreOutOfRange for scores outside [0, 1], InvalidParams
/// for fewer than two or non-increasing edges.
[[nodiscard]] std::vector<ConfidenceBucket> confidence_report(std::span<const ScoredLabel> rows,
                                                              std::span<const double> edges);

/// 0.0, 0.1, ..., 1.0
[[nodiscard]] std::vector<double> default_confidence_edges();

/// `bucket_lo,bucket_hi,correct,incorrect`
[[nodiscard]] std::string format_confidence_report(std::span<const ConfidenceBucket> buckets);

struct PredictionRow {
  std::string id;
  int label = 0;
  int pred = 0;
  double score = 0.0;
  friend bool operator==(const PredictionRow&, const PredictionRow&) = default;
};

/// `id,label,pred,score`
[[nodiscard]] std::string format_predictions(std::span<const PredictionRow> rows);
[[nodiscard]] std::vector<PredictionRow> parse_predictions(std::string_view text);

enum class EpochSplit { Train, Val };

struct EpochRecord {
  std::uint32_t run = 0;
  std::uint32_t epoch = 0;
  EpochSplit split = EpochSplit::Train;
  double loss = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Appends `run,epoch,split,loss,accuracy,f1`, writing the header first when
/// the file is new or empty. Single writer per file. Throws IoError.
void epoch_log_append(const std::filesystem::path& path, const EpochRecord& record);
[[nodiscard]] std::vector<EpochRecord> read_epoch_log(const std::filesystem::path& path);

}  // namespace packscope
