#include <benchmark/benchmark.h>

#include <random>

#include "dtdrift/classifier.hpp"
#include "dtdrift/detectors.hpp"
#include "dtdrift/dtd.hpp"
#include "dtdrift/stream.hpp"

using namespace dtdrift;

namespace {

Stream sea_stream(std::size_t n_chunks, std::size_t chunk_size) {
  StreamConfig c;
  c.n_chunks = n_chunks;
  c.chunk_size = chunk_size;
  return make_stream(c);
}

void BM_GnbTrainChunk(benchmark::State& state) {
  const Stream s = sea_stream(1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    GaussianNB m;
    m.train(s[0]);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GnbTrainChunk)->Arg(1000)->Arg(10000);

void BM_GnbPredictChunk(benchmark::State& state) {
  const Stream s = sea_stream(2, static_cast<std::size_t>(state.range(0)));
  GaussianNB m;
  m.train(s[0]);
  for (auto _ : state) benchmark::DoNotOptimize(chunk_accuracy(m, s[1]));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GnbPredictChunk)->Arg(1000)->Arg(10000);

void BM_DetectorUpdate(benchmark::State& state) {
  const auto kind = static_cast<DetectorKind>(state.range(0));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.2, 0.3);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = u(g);
  auto d = DriftMonitor::make(kind, {}, 1e300);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.update(xs[i++ & 4095], 1000.0));
  }
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_DetectorUpdate)->DenseRange(0, 4);

void BM_DtdStream(benchmark::State& state) {
  const Stream s = sea_stream(100, 1000);
  for (auto _ : state) {
    GaussianNB m;
    m.train(s[0]);
    DtdState dtd(m, DriftMonitor::make(DetectorKind::kDdm), {}, s[0]);
    for (std::size_t t = 1; t < s.size(); ++t) benchmark::DoNotOptimize(dtd.step(s[t]));
  }
  state.SetItemsProcessed(state.iterations() * 99 * 1000);
}
BENCHMARK(BM_DtdStream)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
