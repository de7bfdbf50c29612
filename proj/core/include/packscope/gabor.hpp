#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "packscope/byteplot.hpp"

namespace packscope {

/// Parameters of a single Gabor kernel
///   g(x, y) = exp(-(x'^2 + gamma^2 y'^2) / (2 sigma^2)) * cos(2 pi x' / lambda + psi)
/// with x' = x cos(theta) + y sin(theta), y' = -x sin(theta) + y cos(theta).
struct GaborParams {
  double wavelength = 10.0;  ///< pixels per cycle
  double orientation = 0.0;  ///< radians
  double phase = 0.0;        ///< radians
  double sigma = 3.0;        ///< Gaussian envelope width, pixels
  double gamma = 0.5;        ///< spatial aspect ratio
  std::size_t kernel_size = 9;

  /// Throws InvalidParams on an even size or non-positive wavelength/sigma/gamma.
  void validate() const;
};

/// Square grid of coefficients. Row index r maps to y = r - half (y grows
/// downward), column c to x = c - half (x grows rightward).
struct Kernel {
  std::size_t size = 0;
  std::vector<double> coeffs;

  [[nodiscard]] std::size_t half() const noexcept { return (size - 1) / 2; }
  [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept { return coeffs[row * size + col]; }
  [[nodiscard]] double sum() const noexcept;
  [[nodiscard]] Kernel transposed() const;
};

/// Real-valued raster with the same layout as ByteImage.
struct ResponseMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept { return values[row * width + col]; }
  [[nodiscard]] static ResponseMap from_image(const ByteImage& img);
};

[[nodiscard]] Kernel make_gabor_kernel(const GaborParams& params);

/// True 2-D convolution (kernel flipped) with replicate border handling.
/// Output has the input's dimensions.
[[nodiscard]] ResponseMap convolve2d(const ResponseMap& input, const Kernel& kernel);
[[nodiscard]] ResponseMap convolve2d(const ByteImage& img, const Kernel& kernel);

/// Filter bank: every frequency crossed with every orientation, sharing the
/// remaining kernel parameters. Wavelength for a frequency f is 1 / f.
struct GaborBank {
  std::vector<double> frequencies{0.1, 0.2, 0.3};
  std::vector<double> orientations{0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};
  double phase = 0.0;
  double sigma = 3.0;
  double gamma = 0.5;
  std::size_t kernel_size = 9;
  std::size_t image_size = 64;  ///< images are resized to image_size x image_size first

  void validate() const;
  [[nodiscard]] std::size_t feature_count() const noexcept { return frequencies.size() * orientations.size() * 2; }
  [[nodiscard]] GaborParams params(std::size_t fi, std::size_t oi) const;
  /// Kernels in feature order: frequency-major, orientation-minor.
  [[nodiscard]] std::vector<Kernel> kernels() const;
  /// g_f{fi}_o{oi}_mean / g_f{fi}_o{oi}_var in feature order.
  [[nodiscard]] std::vector<std::string> feature_names() const;
};

/// [mean, variance] per (frequency, orientation) in bank order.
using FeatureVector = std::vector<double>;

/// Population mean and variance of a response field.
struct ResponseStats {
  double mean = 0.0;
  double variance = 0.0;
};
[[nodiscard]] ResponseStats response_stats(std::span<const double> values);

/// Resizes to the bank's square size (bilinear), filters, and concatenates
/// mean/variance of every response.
[[nodiscard]] FeatureVector extract_gabor_jet(const ByteImage& img, const GaborBank& bank);

/// Same as above with precomputed kernels, for batch use.
[[nodiscard]] FeatureVector extract_gabor_jet(const ByteImage& img, const GaborBank& bank,
                                              std::span<const Kernel> kernels);

}  // namespace packscope
