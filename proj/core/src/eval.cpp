#include "packscope/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "packscope/binary_io.hpp"
#include "packscope/error.hpp"

namespace packscope {

namespace {

constexpr std::string_view kPlusMinus = "\xC2\xB1";  // U+00B1

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::FormatError, "bad number '" + s + "'");
  return v;
}

int to_binary(const std::string& s) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw Error(ErrorCode::NonBinaryValue, "expected 0 or 1, got '" + s + "'");
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ratio with the zero-denominator rule
double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

ConfusionMatrix confusion_from_predictions(std::span<const LabelPrediction> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no predictions");
  ConfusionMatrix cm;
  for (const auto& r : rows) {
    if ((r.label != 0 && r.label != 1) || (r.pred != 0 && r.pred != 1)) {
      throw Error(ErrorCode::NonBinaryValue, "labels and predictions must be 0 or 1");
    }
    if (r.label == 1) {
      (r.pred == 1 ? cm.tp : cm.fn) += 1;
    } else {
      (r.pred == 1 ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

std::array<double, 6> metric_values(const Metrics& m) noexcept {
  return {m.accuracy, m.precision, m.recall, m.f1, m.fpr, m.fnr};
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  Metrics m;
  bool unused = false;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total(), unused);
  m.precision = ratio(cm.tp, cm.tp + cm.fp, m.precision_undefined);
  m.recall = ratio(cm.tp, cm.tp + cm.fn, m.recall_undefined);
  m.fpr = ratio(cm.fp, cm.fp + cm.tn, m.fpr_undefined);
  m.fnr = ratio(cm.fn, cm.fn + cm.tp, m.fnr_undefined);
  const double pr = m.precision + m.recall;
  m.f1_undefined = pr == 0.0;
  m.f1 = m.f1_undefined ? 0.0 : 2.0 * m.precision * m.recall / pr;
  return m;
}

RunReport aggregate_runs(std::span<const Metrics> runs) {
  if (runs.empty()) throw Error(ErrorCode::EmptyInput, "no runs to aggregate");
  RunReport report;
  report.runs.assign(runs.begin(), runs.end());
  const double n = static_cast<double>(runs.size());
  for (const auto& m : runs) {
    const auto v = metric_values(m);
    for (std::size_t k = 0; k < v.size(); ++k) report.mean[k] += v[k];
  }
  for (auto& mean : report.mean) mean /= n;
  if (runs.size() >= 2) {
    for (const auto& m : runs) {
      const auto v = metric_values(m);
      for (std::size_t k = 0; k < v.size(); ++k) report.stddev[k] += (v[k] - report.mean[k]) * (v[k] - report.mean[k]);
    }
    for (std::size_t k = 0; k < report.stddev.size(); ++k) {
      report.stddev[k] = std::sqrt(report.stddev[k] / (n - 1.0));
      report.ci95_half_width[k] = 1.96 * report.stddev[k] / std::sqrt(n);
    }
  }
  return report;
}

std::string format_metrics_report(std::string_view model, const RunReport& report) {
  std::string out = "model,run";
  for (auto name : kMetricNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    out += model;
    out += ',' + std::to_string(r + 1);
    for (double v : metric_values(report.runs[r])) out += fmt(",%.9g", v);
    out += '\n';
  }
  auto aggregate_row = [&](std::string_view tag, const std::array<double, 6>& spread) {
    out += model;
    out += ",MEAN";
    out += kPlusMinus;
    out += tag;
    for (std::size_t k = 0; k < 6; ++k) {
      out += fmt(",%.4f", report.mean[k]);
      out += kPlusMinus;
      out += fmt("%.4f", spread[k]);
    }
    out += '\n';
  };
  aggregate_row("STD", report.stddev);
  aggregate_row("CI95", report.ci95_half_width);
  return out;
}

std::vector<Metrics> parse_metrics_report(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !strip_cr(line).starts_with("model,run,")) {
    throw Error(ErrorCode::FormatError, "metrics report header missing");
  }
  std::vector<Metrics> out;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw Error(ErrorCode::FormatError, "metrics row must have 8 fields");
    if (f[1].starts_with("MEAN")) continue;
    Metrics m;
    m.accuracy = to_double(f[2]);
    m.precision = to_double(f[3]);
    m.recall = to_double(f[4]);
    m.f1 = to_double(f[5]);
    m.fpr = to_double(f[6]);
    m.fnr = to_double(f[7]);
    out.push_back(m);
  }
  return out;
}

std::vector<double> default_confidence_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  return edges;
}

std::vector<ConfidenceBucket> confidence_report(std::span<const ScoredLabel> rows, std::span<const double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::InvalidParams, "need at least two bucket edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) throw Error(ErrorCode::InvalidParams, "bucket edges must increase");
  }
  std::vector<ConfidenceBucket> buckets(edges.size() - 1);
  for (std::size_t i = 0; i < buckets.size(); ++i) buckets[i] = {edges[i], edges[i + 1], 0, 0};

  for (const auto& row : rows) {
    if (!(row.score >= 0.0 && row.score <= 1.0)) {
      throw Error(ErrorCode::ScoreOutOfRange, "score " + fmt("%g", row.score) + " is outside [0, 1]");
    }
    const bool correct = (row.score >= 0.5 ? 1 : 0) == row.label;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      const bool last = i + 1 == buckets.size();
      if (row.score >= buckets[i].lo && (row.score < buckets[i].hi || (last && row.score <= buckets[i].hi))) {
        (correct ? buckets[i].correct : buckets[i].incorrect) += 1;
        break;
      }
    }
  }
  return buckets;
}

std::string format_confidence_report(std::span<const ConfidenceBucket> buckets) {
  std::string out = "bucket_lo,bucket_hi,correct,incorrect\n";
  for (const auto& b : buckets) {
    out += fmt("%.9g", b.lo) + fmt(",%.9g", b.hi) + "," + std::to_string(b.correct) + "," +
           std::to_string(b.incorrect) + "\n";
  }
  return out;
}

std::string format_predictions(std::span<const PredictionRow> rows) {
  std::string out = "id,label,pred,score\n";
  for (const auto& r : rows) {
    out += r.id + "," + std::to_string(r.label) + "," + std::to_string(r.pred) + fmt(",%.17g", r.score) + "\n";
  }
  return out;
}

std::vector<PredictionRow> parse_predictions(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "id,label,pred,score") {
    throw Error(ErrorCode::FormatError, "predictions header must be id,label,pred,score");
  }
  std::vector<PredictionRow> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 4) throw Error(ErrorCode::FormatError, "prediction row must have 4 fields");
    rows.push_back({f[0], to_binary(f[1]), to_binary(f[2]), to_double(f[3])});
  }
  return rows;
}

void epoch_log_append(const std::filesystem::path& path, const EpochRecord& record) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for appending");
  if (fresh) out << "run,epoch,split,loss,accuracy,f1\n";
  out << record.run << ',' << record.epoch << ',' << (record.split == EpochSplit::Train ? "train" : "val")
      << fmt(",%.17g", record.loss) << fmt(",%.17g", record.accuracy) << fmt(",%.17g", record.f1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path.string());
}

std::vector<EpochRecord> read_epoch_log(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::istringstream in{std::string(bytes.begin(), bytes.end())};
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "run,epoch,split,loss,accuracy,f1") {
    throw Error(ErrorCode::FormatError, "epoch log header missing");
  }
  std::vector<EpochRecord> records;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw Error(ErrorCode::FormatError, "epoch log row must have 6 fields");
    EpochRecord r;
    r.run = static_cast<std::uint32_t>(std::stoul(f[0]));
    r.epoch = static_cast<std::uint32_t>(std::stoul(f[1]));
    if (f[2] == "train") {
      r.split = EpochSplit::Train;
    } else if (f[2] == "val") {
      r.split = EpochSplit::Val;
    } else {
      throw Error(ErrorCode::FormatError, "epoch split must be train or val");
    }
    r.loss = to_double(f[3]);
    r.accuracy = to_double(f[4]);
    r.f1 = to_double(f[5]);
    records.push_back(r);
  }
  return records;
}

}  // namespace packscope
