#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "packscope/binary_io.hpp"
#include "packscope/byteplot.hpp"
#include "packscope/dataset.hpp"
#include "packscope/gabor.hpp"
#include "packscope/matrix.hpp"

namespace packscope {

/// One feature row per sample, in manifest order.
struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<int> labels;  ///< -1 when unknown (the binary archive carries no labels)
  Matrix features;

  [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

struct SampleFailure {
  std::string id;
  std::string message;
};

struct BatchResult {
  FeatureTable table;
  std::vector<SampleFailure> failures;
};

/// Reads each sample (paths relative to `root`), plots it and extracts its
/// Gabor jet. Failed samples are reported and skipped; throws IoError only if
/// every sample fails. Runs on the worker pool; output keeps manifest order.
[[nodiscard]] BatchResult extract_batch(const Manifest& manifest, const std::filesystem::path& root,
                                        const GaborBank& bank, const WidthPolicy& policy);

/// Bytes -> byte plot -> Gabor jet for a single file.
[[nodiscard]] FeatureVector extract_file_features(const std::filesystem::path& path, const GaborBank& bank,
                                                  const WidthPolicy& policy);

/// `id,label,<columns...>` with values printed as %.9g.
[[nodiscard]] std::string format_feature_csv(const FeatureTable& table);
[[nodiscard]] FeatureTable parse_feature_csv(std::string_view text);

/// Binary archive, little-endian:
///   "PSFA", u16 version = 1, u32 row count, u16 feature count,
///   id table (per row: u32 byte length, UTF-8 bytes),
///   row-major f64 feature values.
[[nodiscard]] Bytes encode_feature_archive(const FeatureTable& table);
[[nodiscard]] FeatureTable decode_feature_archive(std::span<const std::uint8_t> data);

void write_feature_csv(const FeatureTable& table, const std::filesystem::path& path);
void write_feature_archive(const FeatureTable& table, const std::filesystem::path& path);
[[nodiscard]] FeatureTable read_feature_file(const std::filesystem::path& path);

/// Fills labels (and drops rows absent from the manifest) by joining on id.
void attach_labels(FeatureTable& table, const Manifest& manifest);

/// Rows whose manifest split equals `split`, in table order.
[[nodiscard]] std::vector<std::size_t> rows_in_split(const FeatureTable& table, const Manifest& manifest, Split split);

[[nodiscard]] FeatureTable select_rows(const FeatureTable& table, std::span<const std::size_t> indices);

}  // namespace packscope
