#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "packscope/error.hpp"

namespace packscope {

using Bytes = std::vector<std::uint8_t>;

/// Little-endian serializer used by the feature archive and model files.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v);
  void raw(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
  void raw(std::string_view text) { buf_.insert(buf_.end(), text.begin(), text.end()); }

  /// u32 count followed by the elements.
  void f64_array(std::span<const double> values);
  void u32_array(std::span<const std::uint32_t> values);

  [[nodiscard]] const Bytes& bytes() const noexcept { return buf_; }
  Bytes take() noexcept { return std::move(buf_); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

/// Bounds-checked reader; truncation raises `Error` with the configured code.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, ErrorCode on_truncation)
      : data_(data), code_(on_truncation) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  double f64();
  std::span<const std::uint8_t> raw(std::size_t n);
  std::vector<double> f64_array();
  std::vector<std::uint32_t> u32_array();

  [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }
  [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  std::uint64_t get_le(int width);
  void require(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  ErrorCode code_;
};

/// Reads a whole file. Throws IoError, or InputTooLarge past `max_bytes`.
Bytes read_file(const std::filesystem::path& path, std::size_t max_bytes = SIZE_MAX);

/// Writes to `<path>.tmp` then renames over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace packscope
