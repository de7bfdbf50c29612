#include <benchmark/benchmark.h>

#include "packscope/classifiers.hpp"
#include "packscope/rng.hpp"

namespace {

using namespace packscope;

struct Problem {
  Matrix x;
  std::vector<int> y;
};

const Problem& problem() {
  static const Problem p = [] {
    Problem out{Matrix(1000, 24), std::vector<int>(1000)};
    Xorshift64Star rng(11);
    for (std::size_t r = 0; r < 1000; ++r) {
      out.y[r] = static_cast<int>(r % 2);
      for (std::size_t c = 0; c < 24; ++c) out.x(r, c) = rng.uniform(-1.0, 1.0) + (out.y[r] ? 0.5 : -0.5);
    }
    return out;
  }();
  return p;
}

TrainConfig config_for(std::int64_t kind) {
  TrainConfig tc;
  tc.kind = static_cast<ModelKind>(kind);
  tc.seed = 3;
  return tc;
}

void BM_Train(benchmark::State& state) {
  const auto& p = problem();
  const auto tc = config_for(state.range(0));
  state.SetLabel(std::string(to_string(tc.kind)));
  for (auto _ : state) benchmark::DoNotOptimize(train_model(p.x, p.y, tc));
}
BENCHMARK(BM_Train)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto& p = problem();
  const auto tc = config_for(state.range(0));
  state.SetLabel(std::string(to_string(tc.kind)));
  const auto model = train_model(p.x, p.y, tc);
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_confidence(model, p.x.row(r)));
    r = (r + 1) % p.x.rows();
  }
}
BENCHMARK(BM_Predict)->DenseRange(1, 5);

}  // namespace
