#include <benchmark/benchmark.h>

#include "packscope/byteplot.hpp"
#include "packscope/dataset.hpp"
#include "packscope/gabor.hpp"

namespace {

using namespace packscope;

ByteImage sample_image(std::size_t side) {
  return resize_image(
      bytes_to_image(generate_synthetic_binary(SyntheticKind::CodeLike, 64 << 10, 7), WidthPolicy::adaptive()), side, side);
}

void BM_Convolve(benchmark::State& state) {
  const auto img = sample_image(static_cast<std::size_t>(state.range(0)));
  const auto kernel = make_gabor_kernel(GaborParams{});
  for (auto _ : state) benchmark::DoNotOptimize(convolve2d(img, kernel));
}
BENCHMARK(BM_Convolve)->Arg(64)->Arg(224);

void BM_GaborJet(benchmark::State& state) {
  const auto bytes = generate_synthetic_binary(SyntheticKind::CodeLike, 64 << 10, 8);
  const GaborBank bank;
  for (auto _ : state) {
    const auto img = bytes_to_image(bytes, WidthPolicy::adaptive());
    benchmark::DoNotOptimize(extract_gabor_jet(img, bank));
  }
}
BENCHMARK(BM_GaborJet);

}  // namespace
