#include <algorithm>
#include <array>
#include <string_view>

#include "packscope/dataset.hpp"
#include "packscope/error.hpp"
#include "packscope/rng.hpp"

namespace packscope {

namespace {

// Frequent x86 opcode bytes.
constexpr std::array<std::uint8_t, 16> kOpcodes{0x00, 0x8B, 0x89, 0x48, 0xFF, 0xE8, 0x83, 0x0F,
                                                0x85, 0x74, 0xC3, 0x55, 0x5D, 0x50, 0xCC, 0x90};

// Small immediates, displacements and ModRM bytes: 0x01-0x0E and 0x10-0x41.
constexpr std::array<std::uint8_t, 64> kOperands{
    0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x0E, 0x10, 0x11,
    0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x1B, 0x1C, 0x1D, 0x1E, 0x1F, 0x20, 0x21,
    0x22, 0x23, 0x24, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x2B, 0x2C, 0x2D, 0x2E, 0x2F, 0x30, 0x31,
    0x32, 0x33, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x3B, 0x3C, 0x3D, 0x3E, 0x3F, 0x40, 0x41};

constexpr double kOpcodeMass = 0.40;
constexpr double kOperandMass = 0.40;
constexpr double kRestMass = 0.20;

template <std::size_t N>
std::array<double, N> rank_weights(double mass) {
  std::array<double, N> w{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) total += 1.0 / static_cast<double>(i + 1);
  for (std::size_t i = 0; i < N; ++i) w[i] = mass / (static_cast<double>(i + 1) * total);
  return w;
}

std::array<double, 256> build_code_distribution() {
  std::array<double, 256> p{};
  std::array<bool, 256> assigned{};
  const auto op_w = rank_weights<kOpcodes.size()>(kOpcodeMass);
  for (std::size_t i = 0; i < kOpcodes.size(); ++i) {
    p[kOpcodes[i]] = op_w[i];
    assigned[kOpcodes[i]] = true;
  }
  const auto arg_w = rank_weights<kOperands.size()>(kOperandMass);
  for (std::size_t i = 0; i < kOperands.size(); ++i) {
    p[kOperands[i]] = arg_w[i];
    assigned[kOperands[i]] = true;
  }
  const auto rest = static_cast<double>(std::count(assigned.begin(), assigned.end(), false));
  for (std::size_t v = 0; v < 256; ++v) {
    if (!assigned[v]) p[v] = kRestMass / rest;
  }
  return p;
}

class CodeSampler {
 public:
  CodeSampler() {
    const auto& p = code_byte_distribution();
    double acc = 0.0;
    for (std::size_t v = 0; v < 256; ++v) {
      acc += p[v];
      cdf_[v] = acc;
    }
    cdf_[255] = 1.0;
  }

  std::uint8_t draw(Xorshift64Star& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint8_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), 255));
  }

 private:
  std::array<double, 256> cdf_{};
};

const CodeSampler& code_sampler() {
  static const CodeSampler sampler;
  return sampler;
}

constexpr std::array<std::string_view, 48> kVocabulary{
    "the",     "of",      "and",    "to",      "in",      "is",      "file",    "data",
    "error",   "value",   "system", "user",    "for",     "not",     "return",  "string",
    "config",  "version", "path",   "open",    "read",    "write",   "buffer",  "length",
    "invalid", "failed",  "memory", "process", "thread",  "module",  "handle",  "window",
    "message", "service", "update", "network", "address", "library", "default", "options",
    "license", "copyright", "microsoft", "windows", "runtime", "exception", "assert", "debug"};

void append_text(Bytes& out, std::size_t size, Xorshift64Star& rng) {
  const auto weights = rank_weights<kVocabulary.size()>(1.0);
  std::array<double, kVocabulary.size()> cdf{};
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cdf[i] = (acc += weights[i]);
  cdf.back() = 1.0;

  const std::size_t end = out.size() + size;
  std::size_t words_in_line = 0;
  while (out.size() < end) {
    const auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), rng.uniform()) - cdf.begin());
    const auto word = kVocabulary[std::min(idx, kVocabulary.size() - 1)];
    const bool capital = rng.below(8) == 0;
    for (std::size_t i = 0; i < word.size(); ++i) {
      char c = word[i];
      if (i == 0 && capital) c = static_cast<char>(c - 'a' + 'A');
      out.push_back(static_cast<std::uint8_t>(c));
    }
    ++words_in_line;
    const auto roll = rng.below(100);
    if (roll < 4) {
      out.push_back('.');
    } else if (roll < 8) {
      out.push_back(',');
    } else if (roll < 10) {
      out.push_back(static_cast<std::uint8_t>('0' + rng.below(10)));
    }
    if (words_in_line >= 8 + rng.below(6)) {
      out.push_back('\n');
      if (rng.below(4) == 0) out.push_back('\t');
      words_in_line = 0;
    } else {
      out.push_back(' ');
    }
  }
  out.resize(end);
}

void append_code(Bytes& out, std::size_t size, Xorshift64Star& rng) {
  const auto& sampler = code_sampler();
  for (std::size_t i = 0; i < size; ++i) out.push_back(sampler.draw(rng));
}

void append_sparse(Bytes& out, std::size_t size, Xorshift64Star& rng) {
  const std::size_t end = out.size() + size;
  while (out.size() < end) {
    append_code(out, 16 + rng.below(241), rng);
    out.insert(out.end(), 32 + rng.below(993), std::uint8_t{0});
  }
  out.resize(end);
}

void append_section_label(Bytes& out, std::string_view name) {
  std::array<std::uint8_t, 8> label{};
  std::copy_n(name.begin(), std::min(name.size(), label.size()), label.begin());
  out.insert(out.end(), label.begin(), label.end());
}

void append_mixed(Bytes& out, std::size_t size, Xorshift64Star& rng) {
  const std::size_t end = out.size() + size;
  const std::size_t body = size - 4 * 8;
  append_section_label(out, ".text");
  append_code(out, body / 2, rng);
  append_section_label(out, ".rdata");
  append_text(out, body / 4, rng);
  append_section_label(out, ".data");
  append_sparse(out, body / 8, rng);
  append_section_label(out, ".reloc");
  append_code(out, end - out.size(), rng);
}

}  // namespace

const std::array<double, 256>& code_byte_distribution() noexcept {
  static const auto table = build_code_distribution();
  return table;
}

std::string_view variant_tag(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::CodeLike: return "raw-code";
    case SyntheticKind::TextLike: return "raw-text";
    case SyntheticKind::Mixed: return "raw-mixed";
    case SyntheticKind::Sparse: return "raw-sparse";
  }
  return "raw-unknown";
}

Bytes generate_synthetic_binary(SyntheticKind kind, std::size_t size, std::uint64_t seed) {
  if (size < kMinSyntheticSize) {
    throw Error(ErrorCode::SizeTooSmall, "synthetic samples must be at least 1 KiB, got " + std::to_string(size));
  }
  Xorshift64Star rng(derive_seed(seed, variant_tag(kind)));
  Bytes out;
  out.reserve(size + 1024);
  switch (kind) {
    case SyntheticKind::CodeLike: append_code(out, size, rng); break;
    case SyntheticKind::TextLike: append_text(out, size, rng); break;
    case SyntheticKind::Mixed: append_mixed(out, size, rng); break;
    case SyntheticKind::Sparse: append_sparse(out, size, rng); break;
  }
  return out;
}

}  // namespace packscope
