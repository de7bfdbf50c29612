#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "packscope/binary_io.hpp"

namespace packscope {

enum class Label : int { NonPacked = 0, Packed = 1 };
enum class Split { Train, Val, Test, Holdout, Unassigned };

[[nodiscard]] std::string_view to_string(Split split) noexcept;
/// Accepts train, val, test, holdout, unassigned. Throws FormatError.
[[nodiscard]] Split parse_split(std::string_view text);

struct Sample {
  std::string id;
  std::string path;  ///< relative to the manifest's directory
  Label label = Label::NonPacked;
  std::string variant;  ///< raw-code, raw-text, raw-mixed, raw-sparse, tpk-A, tpk-B, tpk-C
  std::uint64_t length = 0;
  Split split = Split::Unassigned;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// True iff the variant tag names a toy-packer output.
[[nodiscard]] constexpr bool is_packed_variant(std::string_view variant) noexcept {
  return variant.starts_with("tpk-");
}

struct Manifest {
  static constexpr int kVersion = 1;

  std::uint64_t seed = 0;
  std::vector<Sample> samples;

  /// Checks id uniqueness and the label/variant correspondence. Throws FormatError.
  void validate() const;
  [[nodiscard]] const Sample* find(std::string_view id) const noexcept;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// JSON-lines: a `{"version":1,"seed":N}` header, then one object per sample
/// with keys id, path, label, variant, len, split.
[[nodiscard]] std::string format_manifest(const Manifest& manifest);
[[nodiscard]] Manifest parse_manifest(std::string_view text);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
[[nodiscard]] Manifest read_manifest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic non-packed binaries

enum class SyntheticKind { CodeLike, TextLike, Mixed, Sparse };

inline constexpr std::size_t kMinSyntheticSize = 1024;

[[nodiscard]] std::string_view variant_tag(SyntheticKind kind) noexcept;

/// Deterministic surrogate content. Throws SizeTooSmall below 1 KiB.
///   CodeLike: 40% of mass on 16 opcode values, 40% on 64 operand values
///             (1/(rank+1) weights inside each group), 20% uniform on the rest.
///   TextLike: words from a fixed vocabulary; every byte in [0x09, 0x7E].
///   Mixed:    labelled sections (code, read-only text, zero-filled data, code).
///   Sparse:   code-like chunks interleaved with zero runs.
[[nodiscard]] Bytes generate_synthetic_binary(SyntheticKind kind, std::size_t size, std::uint64_t seed);

/// Probability table behind CodeLike sampling (sums to 1).
[[nodiscard]] const std::array<double, 256>& code_byte_distribution() noexcept;

// ---------------------------------------------------------------------------
// Toy packer

enum class PackVariant : std::uint8_t { A = 1, B = 2, C = 3 };

struct PackSpec {
  PackVariant variant = PackVariant::A;
  std::array<std::uint8_t, 8> key{};

  /// Key bytes drawn from a seeded stream.
  static PackSpec from_seed(PackVariant variant, std::uint64_t seed) noexcept;
};

[[nodiscard]] std::string_view variant_tag(PackVariant variant) noexcept;

/// Stub header layout (22 bytes):
///   [0,4)   magic "TPKA" / "TPKB" / "TPKC"
///   [4]     0x00
///   [5]     variant code (1, 2, 3)
///   [6,14)  original payload length, u64 little-endian
///   [14,22) key
inline constexpr std::size_t kStubHeaderSize = 22;

/// RLE codec: escape 0xFE; a literal 0xFE is FE 00; runs of 4..255 identical
/// bytes are FE count value.
[[nodiscard]] Bytes rle_encode(std::span<const std::uint8_t> data);
[[nodiscard]] Bytes rle_decode(std::span<const std::uint8_t> data);

/// Keystream: xorshift64* seeded with the key read as a little-endian u64;
/// each output contributes 8 bytes, least significant first. Variant C rotates
/// each keystream byte left by 3 before use.
[[nodiscard]] Bytes pack_keystream(std::span<const std::uint8_t, 8> key, std::size_t length, bool rotate);

/// header || body, where body is
///   A: payload ^ keystream
///   B: rle(payload) ^ keystream
///   C: rle(payload) ^ rotl3(keystream)
/// Throws EmptyPayload.
[[nodiscard]] Bytes toy_pack(std::span<const std::uint8_t> payload, const PackSpec& spec);

/// Inverse of toy_pack. Throws FormatError on bad magic, codes or lengths.
[[nodiscard]] Bytes toy_unpack(std::span<const std::uint8_t> packed);

// ---------------------------------------------------------------------------
// Corpus

struct CorpusConfig {
  std::uint64_t seed = 1;
  std::size_t code = 100;
  std::size_t text = 100;
  std::size_t mixed = 100;
  std::size_t sparse = 100;
  std::size_t packed_a = 200;
  std::size_t packed_b = 200;
  std::size_t packed_c = 100;  ///< unknown-packer holdout
  std::size_t min_size = 16 * 1024;
  std::size_t max_size = 256 * 1024;

  void validate() const;
};

inline constexpr std::string_view kManifestFileName = "manifest.jsonl";

/// Writes samples under out_dir/samples/ and the manifest to
/// out_dir/manifest.jsonl. Variant C samples get split=Holdout, the rest
/// Unassigned. Per-sample streams are derived from (seed, index).
Manifest build_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

/// Per-class shuffle then largest-remainder allocation. Holdout samples are
/// left alone. Throws ClassTooSmall if a class has fewer than 3 samples.
[[nodiscard]] Manifest stratified_split(const Manifest& manifest, const SplitFractions& fractions,
                                        std::uint64_t seed);

/// Random over-sampling. Returns row indices: every original row in order,
/// then minority duplicates drawn with replacement. Throws SingleClassInput.
[[nodiscard]] std::vector<std::size_t> random_oversample(std::span<const int> labels, std::uint64_t seed);

}  // namespace packscope
