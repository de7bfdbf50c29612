#include "packscope/binary_io.hpp"

#include <bit>
#include <fstream>
#include <system_error>

namespace packscope {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InputTooLarge: return "InputTooLarge";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::SizeTooSmall: return "SizeTooSmall";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NonBinaryValue: return "NonBinaryValue";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void ByteWriter::f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }

void ByteWriter::f64_array(std::span<const double> values) {
  u32(static_cast<std::uint32_t>(values.size()));
  for (double v : values) f64(v);
}

void ByteWriter::u32_array(std::span<const std::uint32_t> values) {
  u32(static_cast<std::uint32_t>(values.size()));
  for (auto v : values) u32(v);
}

void ByteReader::require(std::size_t n) const {
  if (n > remaining()) throw Error(code_, "unexpected end of data");
}

std::uint64_t ByteReader::get_le(int width) {
  require(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
  pos_ += static_cast<std::size_t>(width);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(get_le(8)); }

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  require(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<double> ByteReader::f64_array() {
  const std::uint32_t n = u32();
  require(std::size_t{n} * 8);
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

std::vector<std::uint32_t> ByteReader::u32_array() {
  const std::uint32_t n = u32();
  require(std::size_t{n} * 4);
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) v = u32();
  return out;
}

Bytes read_file(const std::filesystem::path& path, std::size_t max_bytes) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat " + path.string() + ": " + ec.message());
  if (size > max_bytes) {
    throw Error(ErrorCode::InputTooLarge, path.string() + " is " + std::to_string(size) + " bytes");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  Bytes data(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw Error(ErrorCode::IoError, "short read on " + path.string());
  }
  return data;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  if (path.empty()) throw Error(ErrorCode::IoError, "empty output path");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace packscope
