#pragma once

#include <filesystem>
#include <span>

#include "packscope/binary_io.hpp"
#include "packscope/byteplot.hpp"

namespace packscope {

/// 8-bit grayscale, single channel, no alpha, no interlacing.
[[nodiscard]] Bytes encode_png(const ByteImage& img);

/// Accepts only 8-bit grayscale without alpha; anything else is FormatError.
[[nodiscard]] ByteImage decode_png(std::span<const std::uint8_t> data);

void export_png(const ByteImage& img, const std::filesystem::path& path);
[[nodiscard]] ByteImage import_png(const std::filesystem::path& path);

}  // namespace packscope
