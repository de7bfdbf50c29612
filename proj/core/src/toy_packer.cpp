#include <cstring>

#include "packscope/dataset.hpp"
#include "packscope/error.hpp"
#include "packscope/rng.hpp"

namespace packscope {

namespace {

constexpr std::uint8_t kEscape = 0xFE;
constexpr std::size_t kMinRun = 4;
constexpr std::size_t kMaxRun = 255;

std::string_view magic_for(PackVariant v) {
  switch (v) {
    case PackVariant::A: return "TPKA";
    case PackVariant::B: return "TPKB";
    case PackVariant::C: return "TPKC";
  }
  return "TPK?";
}

void emit_literal(Bytes& out, std::uint8_t b) {
  out.push_back(b);
  if (b == kEscape) out.push_back(0x00);
}

}  // namespace

PackSpec PackSpec::from_seed(PackVariant variant, std::uint64_t seed) noexcept {
  PackSpec spec{variant, {}};
  Xorshift64Star rng(derive_seed(seed, "pack-key"));
  const std::uint64_t word = rng.next();
  for (std::size_t i = 0; i < spec.key.size(); ++i) spec.key[i] = static_cast<std::uint8_t>(word >> (8 * i));
  return spec;
}

std::string_view variant_tag(PackVariant variant) noexcept {
  switch (variant) {
    case PackVariant::A: return "tpk-A";
    case PackVariant::B: return "tpk-B";
    case PackVariant::C: return "tpk-C";
  }
  return "tpk-?";
}

Bytes rle_encode(std::span<const std::uint8_t> data) {
  Bytes out;
  out.reserve(data.size() + data.size() / 16);
  std::size_t i = 0;
  while (i < data.size()) {
    const std::uint8_t b = data[i];
    std::size_t run = 1;
    while (i + run < data.size() && data[i + run] == b && run < kMaxRun) ++run;
    if (run >= kMinRun) {
      out.push_back(kEscape);
      out.push_back(static_cast<std::uint8_t>(run));
      out.push_back(b);
    } else {
      for (std::size_t k = 0; k < run; ++k) emit_literal(out, b);
    }
    i += run;
  }
  return out;
}

Bytes rle_decode(std::span<const std::uint8_t> data) {
  Bytes out;
  out.reserve(data.size());
  std::size_t i = 0;
  while (i < data.size()) {
    const std::uint8_t b = data[i++];
    if (b != kEscape) {
      out.push_back(b);
      continue;
    }
    if (i >= data.size()) throw Error(ErrorCode::FormatError, "RLE stream ends after escape byte");
    const std::uint8_t count = data[i++];
    if (count == 0) {
      out.push_back(kEscape);
      continue;
    }
    if (count < kMinRun) throw Error(ErrorCode::FormatError, "RLE run shorter than 4");
    if (i >= data.size()) throw Error(ErrorCode::FormatError, "RLE run missing its value byte");
    out.insert(out.end(), count, data[i++]);
  }
  return out;
}

Bytes pack_keystream(std::span<const std::uint8_t, 8> key, std::size_t length, bool rotate) {
  std::uint64_t seed = 0;
  for (std::size_t i = 0; i < 8; ++i) seed |= std::uint64_t{key[i]} << (8 * i);
  Xorshift64Star rng(seed);
  Bytes stream(length);
  for (std::size_t i = 0; i < length; i += 8) {
    const std::uint64_t word = rng.next();
    for (std::size_t k = 0; k < 8 && i + k < length; ++k) {
      auto b = static_cast<std::uint8_t>(word >> (8 * k));
      if (rotate) b = static_cast<std::uint8_t>(((b << 3) | (b >> 5)) & 0xFF);
      stream[i + k] = b;
    }
  }
  return stream;
}

Bytes toy_pack(std::span<const std::uint8_t> payload, const PackSpec& spec) {
  if (payload.empty()) throw Error(ErrorCode::EmptyPayload, "nothing to pack");
  Bytes body = spec.variant == PackVariant::A ? Bytes(payload.begin(), payload.end()) : rle_encode(payload);
  const auto stream = pack_keystream(spec.key, body.size(), spec.variant == PackVariant::C);
  for (std::size_t i = 0; i < body.size(); ++i) body[i] ^= stream[i];

  ByteWriter w;
  w.raw(magic_for(spec.variant));
  w.u8(0x00);
  w.u8(static_cast<std::uint8_t>(spec.variant));
  w.u64(payload.size());
  w.raw(spec.key);
  w.raw(body);
  return w.take();
}

Bytes toy_unpack(std::span<const std::uint8_t> packed) {
  if (packed.size() < kStubHeaderSize) throw Error(ErrorCode::FormatError, "packed data shorter than stub header");
  ByteReader r(packed, ErrorCode::FormatError);
  const auto magic = r.raw(4);
  const std::uint8_t pad = r.u8();
  const std::uint8_t code = r.u8();
  if (code < 1 || code > 3) throw Error(ErrorCode::FormatError, "unknown variant code");
  const auto variant = static_cast<PackVariant>(code);
  if (std::memcmp(magic.data(), magic_for(variant).data(), 4) != 0 || pad != 0) {
    throw Error(ErrorCode::FormatError, "stub magic does not match variant code");
  }
  const std::uint64_t original_len = r.u64();
  std::array<std::uint8_t, 8> key{};
  const auto key_bytes = r.raw(8);
  std::copy(key_bytes.begin(), key_bytes.end(), key.begin());

  const auto cipher = r.raw(r.remaining());
  const auto stream = pack_keystream(key, cipher.size(), variant == PackVariant::C);
  Bytes body(cipher.size());
  for (std::size_t i = 0; i < body.size(); ++i) body[i] = cipher[i] ^ stream[i];
  Bytes payload = variant == PackVariant::A ? std::move(body) : rle_decode(body);
  if (payload.size() != original_len) throw Error(ErrorCode::FormatError, "payload length does not match header");
  return payload;
}

}  // namespace packscope
