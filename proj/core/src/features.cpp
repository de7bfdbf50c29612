#include "packscope/features.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "packscope/error.hpp"
#include "packscope/parallel.hpp"

namespace packscope {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error(ErrorCode::DimensionMismatch, "matrix data size mismatch");
}

void Matrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "row length does not match matrix width");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

namespace {

constexpr std::string_view kArchiveMagic = "PSFA";
constexpr std::uint16_t kArchiveVersion = 1;

}  // namespace

FeatureVector extract_file_features(const std::filesystem::path& path, const GaborBank& bank,
                                    const WidthPolicy& policy) {
  const auto bytes = read_file(path, kMaxInputBytes);
  return extract_gabor_jet(bytes_to_image(bytes, policy), bank);
}

BatchResult extract_batch(const Manifest& manifest, const std::filesystem::path& root, const GaborBank& bank,
                          const WidthPolicy& policy) {
  const auto kernels = bank.kernels();
  const std::size_t n = manifest.samples.size();
  std::vector<FeatureVector> rows(n);
  std::vector<std::string> errors(n);
  std::vector<char> ok(n, 0);

  parallel_for(n, [&](std::size_t i) {
    const auto& sample = manifest.samples[i];
    try {
      const auto bytes = read_file(root / sample.path, kMaxInputBytes);
      rows[i] = extract_gabor_jet(bytes_to_image(bytes, policy), bank, kernels);
      ok[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  BatchResult result;
  result.table.columns = bank.feature_names();
  result.table.features = Matrix(0, bank.feature_count());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sample = manifest.samples[i];
    if (!ok[i]) {
      result.failures.push_back({sample.id, errors[i]});
      continue;
    }
    result.table.ids.push_back(sample.id);
    result.table.labels.push_back(static_cast<int>(sample.label));
    result.table.features.push_row(rows[i]);
  }
  if (n > 0 && result.table.size() == 0) {
    throw Error(ErrorCode::IoError, "every sample failed; first error: " + result.failures.front().message);
  }
  return result;
}

std::string format_feature_csv(const FeatureTable& table) {
  std::string out = "id,label";
  for (const auto& c : table.columns) {
    out += ',';
    out += c;
  }
  out += '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out += table.ids[r];
    out += ',';
    out += std::to_string(table.labels[r]);
    for (double v : table.features.row(r)) {
      std::snprintf(buf, sizeof buf, ",%.9g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field) {
  // strtod handles the full %.9g grammar (inf/nan included).
  std::string tmp(field);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw Error(ErrorCode::FormatError, "bad number '" + tmp + "'");
  }
  return v;
}

}  // namespace

FeatureTable parse_feature_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  FeatureTable table;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, "feature CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "label") {
    throw Error(ErrorCode::FormatError, "feature CSV header must start with id,label");
  }
  for (std::size_t i = 2; i < header.size(); ++i) table.columns.emplace_back(header[i]);
  table.features = Matrix(0, table.columns.size());
  std::vector<double> row(table.columns.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw Error(ErrorCode::FormatError, "feature CSV row has wrong field count");
    table.ids.emplace_back(fields[0]);
    table.labels.push_back(static_cast<int>(parse_double(fields[1])));
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = parse_double(fields[i + 2]);
    table.features.push_row(row);
  }
  return table;
}

Bytes encode_feature_archive(const FeatureTable& table) {
  ByteWriter w;
  w.raw(kArchiveMagic);
  w.u16(kArchiveVersion);
  w.u32(static_cast<std::uint32_t>(table.size()));
  w.u16(static_cast<std::uint16_t>(table.features.cols()));
  for (const auto& id : table.ids) {
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.raw(id);
  }
  for (double v : table.features.data()) w.f64(v);
  return w.take();
}

FeatureTable decode_feature_archive(std::span<const std::uint8_t> data) {
  ByteReader r(data, ErrorCode::FormatError);
  const auto magic = r.raw(4);
  if (std::string_view(reinterpret_cast<const char*>(magic.data()), 4) != kArchiveMagic) {
    throw Error(ErrorCode::FormatError, "not a feature archive (bad magic)");
  }
  if (r.u16() != kArchiveVersion) throw Error(ErrorCode::VersionMismatch, "unsupported feature archive version");
  const std::uint32_t rows = r.u32();
  const std::uint16_t cols = r.u16();

  FeatureTable table;
  table.ids.reserve(rows);
  for (std::uint32_t i = 0; i < rows; ++i) {
    const auto len = r.u32();
    const auto bytes = r.raw(len);
    table.ids.emplace_back(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  std::vector<double> values(std::size_t{rows} * cols);
  for (auto& v : values) v = r.f64();
  if (!r.at_end()) throw Error(ErrorCode::FormatError, "trailing bytes after feature archive");
  table.features = Matrix(rows, cols, std::move(values));
  table.labels.assign(rows, -1);
  // The archive stores no column names.
  for (std::size_t c = 0; c < cols; ++c) table.columns.push_back("f" + std::to_string(c));
  return table;
}

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, format_feature_csv(table));
}

void write_feature_archive(const FeatureTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, encode_feature_archive(table));
}

FeatureTable read_feature_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) == kArchiveMagic) {
    return decode_feature_archive(bytes);
  }
  return parse_feature_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void attach_labels(FeatureTable& table, const Manifest& manifest) {
  std::unordered_map<std::string_view, const Sample*> by_id;
  for (const auto& s : manifest.samples) by_id.emplace(s.id, &s);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto it = by_id.find(table.ids[i]);
    if (it == by_id.end()) continue;
    table.labels[i] = static_cast<int>(it->second->label);
    keep.push_back(i);
  }
  if (keep.size() != table.size()) table = select_rows(table, keep);
}

std::vector<std::size_t> rows_in_split(const FeatureTable& table, const Manifest& manifest, Split split) {
  std::unordered_map<std::string_view, Split> by_id;
  for (const auto& s : manifest.samples) by_id.emplace(s.id, s.split);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto it = by_id.find(table.ids[i]);
    if (it != by_id.end() && it->second == split) rows.push_back(i);
  }
  return rows;
}

FeatureTable select_rows(const FeatureTable& table, std::span<const std::size_t> indices) {
  FeatureTable out;
  out.columns = table.columns;
  out.features = table.features.select_rows(indices);
  for (auto i : indices) {
    out.ids.push_back(table.ids[i]);
    out.labels.push_back(table.labels[i]);
  }
  return out;
}

}  // namespace packscope
