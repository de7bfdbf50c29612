#include <benchmark/benchmark.h>

#include "packscope/byteplot.hpp"
#include "packscope/dataset.hpp"
#include "packscope/png_io.hpp"

namespace {

using namespace packscope;

void BM_BytesToImage(benchmark::State& state) {
  const auto bytes = generate_synthetic_binary(SyntheticKind::CodeLike, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(bytes_to_image(bytes, WidthPolicy::adaptive()));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BytesToImage)->Arg(16 << 10)->Arg(256 << 10)->Arg(2 << 20);

void BM_Resize(benchmark::State& state) {
  const auto img = bytes_to_image(generate_synthetic_binary(SyntheticKind::Mixed, 256 << 10, 2), WidthPolicy::adaptive());
  const auto method = state.range(0) ? ResizeMethod::Bilinear : ResizeMethod::Nearest;
  for (auto _ : state) benchmark::DoNotOptimize(resize_image(img, 224, 224, method));
}
BENCHMARK(BM_Resize)->Arg(0)->Arg(1);

void BM_EncodePng(benchmark::State& state) {
  const auto img = resize_image(
      bytes_to_image(generate_synthetic_binary(SyntheticKind::CodeLike, 64 << 10, 3), WidthPolicy::adaptive()), 224, 224);
  for (auto _ : state) benchmark::DoNotOptimize(encode_png(img));
}
BENCHMARK(BM_EncodePng);

void BM_ToyPack(benchmark::State& state) {
  const auto payload = generate_synthetic_binary(SyntheticKind::CodeLike, 64 << 10, 4);
  const auto spec = PackSpec::from_seed(static_cast<PackVariant>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(toy_pack(payload, spec));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(payload.size()));
}
BENCHMARK(BM_ToyPack)->DenseRange(1, 3);

}  // namespace
