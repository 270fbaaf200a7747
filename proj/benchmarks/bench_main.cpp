#include <benchmark/benchmark.h>

#include <vector>

#include "ggm/codec.hpp"
#include "ggm/ggm.hpp"
#include "ggm/grad.hpp"
#include "ggm/specfun.hpp"

namespace {

void BM_RegLowerGamma(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 4.0;  // shape a = arg / 4
  double b = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggm::specfun::reg_lower_incomplete_gamma(a, b));
    b = b < 40.0 ? b * 1.01 : 0.01;
  }
}
BENCHMARK(BM_RegLowerGamma)->Arg(1)->Arg(4)->Arg(40);

void BM_Cdf(benchmark::State& state) {
  const ggm::GgmParams p{0.0, 1.0, 1.3};
  double y = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggm::cdf(y, p));
    y = y < 5.0 ? y + 0.01 : -5.0;
  }
}
BENCHMARK(BM_Cdf);

void BM_CdfGradients(benchmark::State& state) {
  const ggm::GgmParams p{0.0, 1.0, 1.3};
  double y = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ggm::grad::cdf_gradients(y, p));
    y = y < 5.0 ? y + 0.01 : -5.0;
  }
}
BENCHMARK(BM_CdfGradients);

std::vector<std::int64_t> symbols(const ggm::GgmParams& p, std::size_t n) {
  std::vector<std::int64_t> s;
  for (double y : ggm::sample(p, n, 1)) s.push_back(ggm::quantize_zero_center(y, p.mu).symbol);
  return s;
}

void BM_Encode(benchmark::State& state) {
  const ggm::GgmParams p{0.0, 2.0, 1.2};
  const auto s = symbols(p, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ggm::codec::encode_with_model(s, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Arg(1 << 12)->Arg(1 << 17);

void BM_Decode(benchmark::State& state) {
  const ggm::GgmParams p{0.0, 2.0, 1.2};
  const auto bs = ggm::codec::encode_with_model(symbols(p, static_cast<std::size_t>(state.range(0))), p);
  for (auto _ : state) benchmark::DoNotOptimize(ggm::codec::decode_with_model(bs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decode)->Arg(1 << 12)->Arg(1 << 17);

}  // namespace

BENCHMARK_MAIN();
