#include "packscope/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "packscope/error.hpp"
#include "packscope/rng.hpp"

namespace packscope {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Holdout: return "holdout";
    case Split::Unassigned: return "unassigned";
  }
  return "unassigned";
}

Split parse_split(std::string_view text) {
  for (auto s : {Split::Train, Split::Val, Split::Test, Split::Holdout, Split::Unassigned}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::FormatError, "unknown split '" + std::string(text) + "'");
}

void Manifest::validate() const {
  std::set<std::string_view> ids;
  for (const auto& s : samples) {
    if (s.id.empty()) throw Error(ErrorCode::FormatError, "sample with empty id");
    if (!ids.insert(s.id).second) throw Error(ErrorCode::FormatError, "duplicate sample id '" + s.id + "'");
    if ((s.label == Label::Packed) != is_packed_variant(s.variant)) {
      throw Error(ErrorCode::FormatError, "label of '" + s.id + "' contradicts variant '" + s.variant + "'");
    }
  }
}

const Sample* Manifest::find(std::string_view id) const noexcept {
  for (const auto& s : samples) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::string format_manifest(const Manifest& manifest) {
  std::string out;
  ordered_json header;
  header["version"] = Manifest::kVersion;
  header["seed"] = manifest.seed;
  out += header.dump();
  out += '\n';
  for (const auto& s : manifest.samples) {
    ordered_json line;
    line["id"] = s.id;
    line["path"] = s.path;
    line["label"] = static_cast<int>(s.label);
    line["variant"] = s.variant;
    line["len"] = s.length;
    line["split"] = to_string(s.split);
    out += line.dump();
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Manifest manifest;
  bool have_header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto obj = ordered_json::parse(line);
      if (!have_header) {
        if (obj.size() != 2 || !obj.contains("version") || !obj.contains("seed")) {
          throw Error(ErrorCode::FormatError, "manifest header must be {\"version\":1,\"seed\":N}");
        }
        if (obj.at("version").get<int>() != Manifest::kVersion) {
          throw Error(ErrorCode::VersionMismatch, "unsupported manifest version");
        }
        manifest.seed = obj.at("seed").get<std::uint64_t>();
        have_header = true;
        continue;
      }
      if (obj.size() != 6) throw Error(ErrorCode::FormatError, "manifest line " + std::to_string(line_no) + " has unexpected keys");
      Sample s;
      s.id = obj.at("id").get<std::string>();
      s.path = obj.at("path").get<std::string>();
      const int label = obj.at("label").get<int>();
      if (label != 0 && label != 1) throw Error(ErrorCode::FormatError, "label must be 0 or 1");
      s.label = static_cast<Label>(label);
      s.variant = obj.at("variant").get<std::string>();
      s.length = obj.at("len").get<std::uint64_t>();
      s.split = parse_split(obj.at("split").get<std::string>());
      manifest.samples.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, "manifest line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw Error(ErrorCode::FormatError, "manifest has no header line");
  manifest.validate();
  return manifest;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, format_manifest(manifest));
}

Manifest read_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void CorpusConfig::validate() const {
  if (min_size < kMinSyntheticSize) throw Error(ErrorCode::InvalidParams, "min_size must be at least 1 KiB");
  if (max_size < min_size) throw Error(ErrorCode::InvalidParams, "max_size must be >= min_size");
  if (code + text + mixed + sparse == 0) throw Error(ErrorCode::InvalidParams, "corpus needs non-packed samples");
  if (packed_a + packed_b + packed_c == 0) throw Error(ErrorCode::InvalidParams, "corpus needs packed samples");
}

namespace {

std::size_t log_uniform_size(Xorshift64Star& rng, std::size_t lo, std::size_t hi) {
  if (lo == hi) return lo;
  const double v = std::exp(rng.uniform(std::log(static_cast<double>(lo)), std::log(static_cast<double>(hi))));
  return std::clamp(static_cast<std::size_t>(v), lo, hi);
}

std::string sample_id(std::size_t index, std::string_view variant) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", index);
  return std::string(buf) + "-" + std::string(variant);
}

}  // namespace

Manifest build_corpus(const CorpusConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "samples", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (out_dir / "samples").string() + ": " + ec.message());

  struct Plan {
    std::size_t count;
    bool packed;
    SyntheticKind kind;
    PackVariant variant;
  };
  const std::array<Plan, 7> plan{{
      {config.code, false, SyntheticKind::CodeLike, PackVariant::A},
      {config.text, false, SyntheticKind::TextLike, PackVariant::A},
      {config.mixed, false, SyntheticKind::Mixed, PackVariant::A},
      {config.sparse, false, SyntheticKind::Sparse, PackVariant::A},
      {config.packed_a, true, SyntheticKind::CodeLike, PackVariant::A},
      {config.packed_b, true, SyntheticKind::CodeLike, PackVariant::B},
      {config.packed_c, true, SyntheticKind::CodeLike, PackVariant::C},
  }};
  constexpr std::array<SyntheticKind, 4> kPayloadKinds{SyntheticKind::CodeLike, SyntheticKind::TextLike,
                                                       SyntheticKind::Mixed, SyntheticKind::Sparse};

  Manifest manifest;
  manifest.seed = config.seed;
  std::size_t index = 0;
  for (const auto& group : plan) {
    for (std::size_t n = 0; n < group.count; ++n, ++index) {
      Xorshift64Star rng(derive_seed(config.seed, "sample", index));
      const std::size_t size = log_uniform_size(rng, config.min_size, config.max_size);
      Bytes content;
      Sample s;
      if (group.packed) {
        const auto kind = kPayloadKinds[rng.below(kPayloadKinds.size())];
        const auto payload = generate_synthetic_binary(kind, size, rng.next());
        content = toy_pack(payload, PackSpec::from_seed(group.variant, rng.next()));
        s.variant = std::string(variant_tag(group.variant));
        s.label = Label::Packed;
        s.split = group.variant == PackVariant::C ? Split::Holdout : Split::Unassigned;
      } else {
        content = generate_synthetic_binary(group.kind, size, rng.next());
        s.variant = std::string(variant_tag(group.kind));
        s.label = Label::NonPacked;
      }
      s.id = sample_id(index, s.variant);
      s.path = "samples/" + s.id + ".bin";
      s.length = content.size();
      write_file_atomic(out_dir / s.path, content);
      manifest.samples.push_back(std::move(s));
    }
  }
  write_manifest(manifest, out_dir / kManifestFileName);
  return manifest;
}

Manifest stratified_split(const Manifest& manifest, const SplitFractions& fractions, std::uint64_t seed) {
  const std::array<double, 3> f{fractions.train, fractions.val, fractions.test};
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9 || f[0] < 0 || f[1] < 0 || f[2] < 0) {
    throw Error(ErrorCode::InvalidParams, "split fractions must be non-negative and sum to 1");
  }
  constexpr std::array<Split, 3> kTargets{Split::Train, Split::Val, Split::Test};

  Manifest out = manifest;
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      const auto& s = out.samples[i];
      if (s.split != Split::Holdout && static_cast<int>(s.label) == label) members.push_back(i);
    }
    if (members.size() < 3) {
      throw Error(ErrorCode::ClassTooSmall, "class " + std::to_string(label) + " has " +
                                                std::to_string(members.size()) + " samples; need >= 3");
    }
    Xorshift64Star rng(derive_seed(seed, "split", static_cast<std::uint64_t>(label)));
    for (std::size_t i = members.size() - 1; i > 0; --i) std::swap(members[i], members[rng.below(i + 1)]);

    // Largest remainder: floor each quota, then hand leftovers to the largest
    // fractional parts (earlier split wins ties).
    const double n = static_cast<double>(members.size());
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double quota = n * f[k];
      counts[k] = static_cast<std::size_t>(std::floor(quota));
      remainders[k] = quota - static_cast<double>(counts[k]);
      assigned += counts[k];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainders[a] > remainders[b]; });
    for (std::size_t k = 0; assigned < members.size(); ++k, ++assigned) ++counts[order[k % 3]];

    std::size_t pos = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < counts[k]; ++c) out.samples[members[pos++]].split = kTargets[k];
    }
  }
  return out;
}

std::vector<std::size_t> random_oversample(std::span<const int> labels, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::NonBinaryLabels, "labels must be 0 or 1");
    rows[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  if (rows[0].empty() || rows[1].empty()) {
    throw Error(ErrorCode::SingleClassInput, "oversampling needs both classes present");
  }
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;

  const auto& minority = rows[0].size() < rows[1].size() ? rows[0] : rows[1];
  const std::size_t majority = std::max(rows[0].size(), rows[1].size());
  Xorshift64Star rng(derive_seed(seed, "ros"));
  for (std::size_t n = minority.size(); n < majority; ++n) out.push_back(minority[rng.below(minority.size())]);
  return out;
}

}  // namespace packscope
