#include "packscope/byteplot.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "packscope/error.hpp"

namespace packscope {

ByteImage::ByteImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels,
                     std::size_t source_len)
    : width_(width), height_(height), pixels_(std::move(pixels)), source_len_(source_len) {
  if (width_ == 0 || height_ == 0) throw Error(ErrorCode::InvalidParams, "image dimensions must be positive");
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::InvalidParams, "pixel count does not match width * height");
  }
  if (source_len_ > pixels_.size()) throw Error(ErrorCode::InvalidParams, "source_len exceeds pixel count");
}

ByteImage ByteImage::transposed() const {
  std::vector<std::uint8_t> out(pixels_.size());
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < width_; ++c) out[c * height_ + r] = pixels_[r * width_ + c];
  }
  const std::size_t n = pixels_.size();
  return {height_, width_, std::move(out), n};
}

WidthPolicy WidthPolicy::fixed(std::size_t width) {
  if (width == 0) throw Error(ErrorCode::InvalidParams, "fixed width must be >= 1");
  return {Mode::Fixed, width};
}

WidthPolicy WidthPolicy::parse(std::string_view text) {
  if (text == "adaptive") return adaptive();
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const auto digits = text.substr(prefix.size());
    std::size_t width = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), width);
    if (ec == std::errc{} && ptr == digits.data() + digits.size()) return fixed(width);
  }
  throw Error(ErrorCode::ConfigError, "width policy must be 'adaptive' or 'fixed:N', got '" +
                                          std::string(text) + "'");
}

std::string WidthPolicy::to_string() const {
  return mode == Mode::Adaptive ? std::string("adaptive") : "fixed:" + std::to_string(fixed_width);
}

std::size_t WidthPolicy::width_for(std::size_t byte_count) const noexcept {
  return mode == Mode::Fixed ? fixed_width : adaptive_width(byte_count);
}

std::size_t adaptive_width(std::size_t byte_count) noexcept {
  constexpr std::size_t KiB = 1024;
  struct Step {
    std::size_t below;
    std::size_t width;
  };
  constexpr std::array<Step, 7> table{{
      {10 * KiB, 32},
      {30 * KiB, 64},
      {60 * KiB, 128},
      {100 * KiB, 256},
      {200 * KiB, 384},
      {500 * KiB, 512},
      {1024 * KiB, 768},
  }};
  for (const auto& step : table) {
    if (byte_count < step.below) return step.width;
  }
  return 1024;
}

ByteImage bytes_to_image(std::span<const std::uint8_t> bytes, const WidthPolicy& policy) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "cannot plot an empty byte sequence");
  if (bytes.size() > kMaxInputBytes) {
    throw Error(ErrorCode::InputTooLarge, std::to_string(bytes.size()) + " bytes exceeds the 256 MiB limit");
  }
  const std::size_t width = policy.width_for(bytes.size());
  if (width == 0) throw Error(ErrorCode::InvalidParams, "width policy produced zero width");
  const std::size_t height = (bytes.size() + width - 1) / width;
  std::vector<std::uint8_t> pixels(width * height, 0);
  std::copy(bytes.begin(), bytes.end(), pixels.begin());
  return {width, height, std::move(pixels), bytes.size()};
}

namespace {

double sample_point(std::size_t t, std::size_t src, std::size_t dst) {
  const double s = (static_cast<double>(t) + 0.5) * static_cast<double>(src) / static_cast<double>(dst) - 0.5;
  return std::clamp(s, 0.0, static_cast<double>(src - 1));
}

}  // namespace

ByteImage resize_image(const ByteImage& img, std::size_t target_w, std::size_t target_h, ResizeMethod method) {
  if (target_w == 0 || target_h == 0) throw Error(ErrorCode::InvalidParams, "resize target must be >= 1");
  const std::size_t sw = img.width();
  const std::size_t sh = img.height();
  std::vector<std::uint8_t> out(target_w * target_h);

  if (method == ResizeMethod::Nearest) {
    std::vector<std::size_t> xs(target_w);
    for (std::size_t tx = 0; tx < target_w; ++tx) {
      xs[tx] = static_cast<std::size_t>(std::ceil(sample_point(tx, sw, target_w) - 0.5));
    }
    for (std::size_t ty = 0; ty < target_h; ++ty) {
      const auto sy = static_cast<std::size_t>(std::ceil(sample_point(ty, sh, target_h) - 0.5));
      for (std::size_t tx = 0; tx < target_w; ++tx) out[ty * target_w + tx] = img.at(sy, xs[tx]);
    }
    return {target_w, target_h, std::move(out), target_w * target_h};
  }

  struct Tap {
    std::size_t lo;
    std::size_t hi;
    double frac;
  };
  auto taps = [](std::size_t src, std::size_t dst) {
    std::vector<Tap> result(dst);
    for (std::size_t t = 0; t < dst; ++t) {
      const double s = sample_point(t, src, dst);
      const auto lo = static_cast<std::size_t>(std::floor(s));
      result[t] = {lo, std::min(lo + 1, src - 1), s - static_cast<double>(lo)};
    }
    return result;
  };
  const auto xt = taps(sw, target_w);
  const auto yt = taps(sh, target_h);
  for (std::size_t ty = 0; ty < target_h; ++ty) {
    const auto& y = yt[ty];
    for (std::size_t tx = 0; tx < target_w; ++tx) {
      const auto& x = xt[tx];
      const double top = img.at(y.lo, x.lo) * (1.0 - x.frac) + img.at(y.lo, x.hi) * x.frac;
      const double bottom = img.at(y.hi, x.lo) * (1.0 - x.frac) + img.at(y.hi, x.hi) * x.frac;
      const double v = std::floor(top * (1.0 - y.frac) + bottom * y.frac + 0.5);
      out[ty * target_w + tx] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return {target_w, target_h, std::move(out), target_w * target_h};
}

double shannon_entropy(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "entropy of an empty byte sequence");
  std::array<std::size_t, 256> counts{};
  for (auto b : bytes) ++counts[b];
  const double n = static_cast<double>(bytes.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return std::clamp(h, 0.0, 8.0);
}

}  // namespace packscope
