#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace packscope {

/// Files above this size are rejected with InputTooLarge.
inline constexpr std::size_t kMaxInputBytes = std::size_t{256} << 20;

/// Row-major 8-bit grayscale raster built from file bytes. Pixels past
/// `source_len` are zero padding that completes the final row.
class ByteImage {
 public:
  ByteImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels,
            std::size_t source_len);

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t source_len() const noexcept { return source_len_; }
  [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::uint8_t at(std::size_t row, std::size_t col) const noexcept {
    return pixels_[row * width_ + col];
  }

  [[nodiscard]] ByteImage transposed() const;

  friend bool operator==(const ByteImage&, const ByteImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
  std::size_t source_len_;
};

/// Either a fixed width or the size-driven adaptive table.
struct WidthPolicy {
  enum class Mode { Fixed, Adaptive };

  Mode mode = Mode::Adaptive;
  std::size_t fixed_width = 0;

  static WidthPolicy fixed(std::size_t width);
  static WidthPolicy adaptive() noexcept { return {}; }

  /// Accepts "adaptive" or "fixed:N".
  static WidthPolicy parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] std::size_t width_for(std::size_t byte_count) const noexcept;

  friend bool operator==(const WidthPolicy&, const WidthPolicy&) = default;
};

/// Adaptive width table:
///   < 10 KiB -> 32, < 30 KiB -> 64, < 60 KiB -> 128, < 100 KiB -> 256,
///   < 200 KiB -> 384, < 500 KiB -> 512, < 1 MiB -> 768, otherwise 1024.
[[nodiscard]] std::size_t adaptive_width(std::size_t byte_count) noexcept;

/// Lays bytes out left-to-right, top-to-bottom. Throws EmptyInput or InputTooLarge.
[[nodiscard]] ByteImage bytes_to_image(std::span<const std::uint8_t> bytes, const WidthPolicy& policy);

enum class ResizeMethod { Nearest, Bilinear };

/// Sample point per axis: s = (t + 0.5) * src / dst - 0.5, clamped to [0, src - 1].
/// Nearest takes ceil(s - 0.5) so exact halves go to the lower index; Bilinear
/// blends the four neighbours and rounds the value half-up.
[[nodiscard]] ByteImage resize_image(const ByteImage& img, std::size_t target_w, std::size_t target_h,
                                     ResizeMethod method = ResizeMethod::Bilinear);

/// Shannon entropy in bits per byte. Throws EmptyInput.
[[nodiscard]] double shannon_entropy(std::span<const std::uint8_t> bytes);

}  // namespace packscope
