#pragma once

#include <filesystem>
#include <span>

#include "packscope/binary_io.hpp"
#include "packscope/classifiers.hpp"

namespace packscope {

/*
 * Model file, little-endian throughout. "f64[]" is a u32 count followed by
 * that many f64 values; "u32[]" likewise with u32 values.
 *
 *   "PSMD"  u16 version (=1)  u8 kind  u64 seed
 *   scaler: f64[] mean, f64[] stddev
 *   knn:    u32 k, u32 rows, u32 cols, f64[] rows (row-major), u32[] labels
 *   logreg: f64 learning_rate, u32 epochs, f64 l2, f64[] weights, f64 bias
 *   rf:     u32 n_trees, u32 max_depth, u32 min_leaf, u32 features_per_split,
 *           u32 bootstrap, u32 tree count, then per tree: u32 node count and
 *           per node u32 feature (0xFFFFFFFF = leaf), f64 threshold,
 *           u32 left, u32 right, f64 positive_fraction
 *   mlp:    f64 learning_rate, u32 epochs, u32[] hidden_sizes, u32 layer count,
 *           then per layer: u32 inputs, u32 outputs, f64[] weights, f64[] biases
 *   svm:    f64 c, f64 learning_rate, u32 epochs, f64[] weights, f64 bias
 */
inline constexpr std::uint16_t kModelFormatVersion = 1;

[[nodiscard]] Bytes encode_model(const TrainedModel& model);

/// Throws CorruptModel (bad magic, truncation, trailing bytes, inconsistent
/// shapes) or VersionMismatch.
[[nodiscard]] TrainedModel decode_model(std::span<const std::uint8_t> data);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
[[nodiscard]] TrainedModel load_model(const std::filesystem::path& path);

}  // namespace packscope
