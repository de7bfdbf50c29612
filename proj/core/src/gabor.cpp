#include "packscope/gabor.hpp"

#include <cmath>
#include <numbers>

#include "packscope/error.hpp"

namespace packscope {

void GaborParams::validate() const {
  if (kernel_size == 0 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::InvalidParams, "kernel size must be odd and positive");
  }
  if (!(wavelength > 0.0) || !(sigma > 0.0) || !(gamma > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "wavelength, sigma and gamma must be positive");
  }
}

double Kernel::sum() const noexcept {
  double s = 0.0;
  for (double c : coeffs) s += c;
  return s;
}

Kernel Kernel::transposed() const {
  Kernel t{size, std::vector<double>(coeffs.size())};
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) t.coeffs[c * size + r] = coeffs[r * size + c];
  }
  return t;
}

ResponseMap ResponseMap::from_image(const ByteImage& img) {
  ResponseMap m{img.width(), img.height(), std::vector<double>(img.pixels().size())};
  std::copy(img.pixels().begin(), img.pixels().end(), m.values.begin());
  return m;
}

Kernel make_gabor_kernel(const GaborParams& p) {
  p.validate();
  Kernel k{p.kernel_size, std::vector<double>(p.kernel_size * p.kernel_size)};
  const auto half = static_cast<long>(k.half());
  const double cos_t = std::cos(p.orientation);
  const double sin_t = std::sin(p.orientation);
  const double two_sigma_sq = 2.0 * p.sigma * p.sigma;
  const double gamma_sq = p.gamma * p.gamma;
  for (long r = 0; r < static_cast<long>(p.kernel_size); ++r) {
    const double y = static_cast<double>(r - half);
    for (long c = 0; c < static_cast<long>(p.kernel_size); ++c) {
      const double x = static_cast<double>(c - half);
      const double xr = x * cos_t + y * sin_t;
      const double yr = -x * sin_t + y * cos_t;
      k.coeffs[static_cast<std::size_t>(r) * p.kernel_size + static_cast<std::size_t>(c)] =
          std::exp(-(xr * xr + gamma_sq * yr * yr) / two_sigma_sq) *
          std::cos(2.0 * std::numbers::pi * xr / p.wavelength + p.phase);
    }
  }
  return k;
}

ResponseMap convolve2d(const ResponseMap& input, const Kernel& kernel) {
  if (input.width == 0 || input.height == 0) throw Error(ErrorCode::InvalidParams, "empty input to convolve2d");
  const std::size_t w = input.width;
  const std::size_t h = input.height;
  const std::size_t ks = kernel.size;
  const auto half = static_cast<long>(kernel.half());

  // Pad once with clamped edges so the inner loop is branch-free.
  const std::size_t pw = w + 2 * kernel.half();
  const std::size_t ph = h + 2 * kernel.half();
  std::vector<double> padded(pw * ph);
  for (std::size_t pr = 0; pr < ph; ++pr) {
    const auto sr = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(pr) - half, 0, static_cast<long>(h) - 1));
    for (std::size_t pc = 0; pc < pw; ++pc) {
      const auto sc = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(pc) - half, 0, static_cast<long>(w) - 1));
      padded[pr * pw + pc] = input.values[sr * w + sc];
    }
  }

  // out(r, c) = sum_{i,j} k(i, j) * in(r - (i - half), c - (j - half)).
  // In padded coordinates the source row is r + 2*half - i.
  ResponseMap out{w, h, std::vector<double>(w * h, 0.0)};
  for (std::size_t r = 0; r < h; ++r) {
    double* dst = out.values.data() + r * w;
    for (std::size_t i = 0; i < ks; ++i) {
      const double* src_row = padded.data() + (r + ks - 1 - i) * pw;
      for (std::size_t j = 0; j < ks; ++j) {
        const double coeff = kernel.coeffs[i * ks + j];
        const double* src = src_row + (ks - 1 - j);
        for (std::size_t c = 0; c < w; ++c) dst[c] += coeff * src[c];
      }
    }
  }
  return out;
}

ResponseMap convolve2d(const ByteImage& img, const Kernel& kernel) {
  return convolve2d(ResponseMap::from_image(img), kernel);
}

void GaborBank::validate() const {
  if (frequencies.empty() || orientations.empty()) {
    throw Error(ErrorCode::InvalidParams, "bank needs at least one frequency and one orientation");
  }
  for (double f : frequencies) {
    if (!(f > 0.0)) throw Error(ErrorCode::InvalidParams, "frequencies must be positive");
  }
  if (image_size == 0) throw Error(ErrorCode::InvalidParams, "bank image size must be positive");
  params(0, 0).validate();
}

GaborParams GaborBank::params(std::size_t fi, std::size_t oi) const {
  return {1.0 / frequencies.at(fi), orientations.at(oi), phase, sigma, gamma, kernel_size};
}

std::vector<Kernel> GaborBank::kernels() const {
  validate();
  std::vector<Kernel> out;
  out.reserve(frequencies.size() * orientations.size());
  for (std::size_t fi = 0; fi < frequencies.size(); ++fi) {
    for (std::size_t oi = 0; oi < orientations.size(); ++oi) out.push_back(make_gabor_kernel(params(fi, oi)));
  }
  return out;
}

std::vector<std::string> GaborBank::feature_names() const {
  std::vector<std::string> names;
  names.reserve(feature_count());
  for (std::size_t fi = 0; fi < frequencies.size(); ++fi) {
    for (std::size_t oi = 0; oi < orientations.size(); ++oi) {
      const std::string stem = "g_f" + std::to_string(fi) + "_o" + std::to_string(oi);
      names.push_back(stem + "_mean");
      names.push_back(stem + "_var");
    }
  }
  return names;
}

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

// Deviations are taken from the first sample, so a constant field yields a
// mean equal to that constant and a variance of exactly zero.
ResponseStats response_stats(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double shift = values.front();
  CompensatedSum dev;
  for (double v : values) dev.add(v - shift);
  const double mean = shift + dev.value() / n;
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  return {mean, sq.value() / n};
}

FeatureVector extract_gabor_jet(const ByteImage& img, const GaborBank& bank) {
  const auto kernels = bank.kernels();
  return extract_gabor_jet(img, bank, kernels);
}

FeatureVector extract_gabor_jet(const ByteImage& img, const GaborBank& bank, std::span<const Kernel> kernels) {
  const auto resized = resize_image(img, bank.image_size, bank.image_size, ResizeMethod::Bilinear);
  const auto input = ResponseMap::from_image(resized);
  FeatureVector features;
  features.reserve(kernels.size() * 2);
  for (const auto& k : kernels) {
    const auto stats = response_stats(convolve2d(input, k).values);
    features.push_back(stats.mean);
    features.push_back(stats.variance);
  }
  return features;
}

}  // namespace packscope
