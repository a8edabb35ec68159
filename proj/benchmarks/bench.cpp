#include <benchmark/benchmark.h>

#include <random>

#include "prym/fixtures.hpp"
#include "prym/flow.hpp"
#include "prym/models.hpp"

using namespace prym;

namespace {

std::vector<QuadElem> sample(long d, int n) {
  std::mt19937_64 rng(d);
  std::uniform_int_distribution<long> num(-1000, 1000), den(1, 1000);
  std::vector<QuadElem> out;
  const QuadraticField f(d);
  for (int i = 0; i < n; ++i) out.emplace_back(f, Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
  return out;
}

void BM_QuadMultiply(benchmark::State& state) {
  const auto xs = sample(state.range(0), 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xs[i % 256] * xs[(i + 1) % 256]);
    ++i;
  }
}
BENCHMARK(BM_QuadMultiply)->Arg(2)->Arg(33);

void BM_QuadInverse(benchmark::State& state) {
  const auto xs = sample(state.range(0), 256);
  std::size_t i = 0;
  for (auto _ : state) {
    const QuadElem& x = xs[i++ % 256];
    if (!x.is_zero()) benchmark::DoNotOptimize(inverse(x));
  }
}
BENCHMARK(BM_QuadInverse)->Arg(2)->Arg(33);

void BM_QuadSign(benchmark::State& state) {
  const QuadraticField f(2);
  // Near-cancelling values defeat the floating-point filter.
  const std::vector<QuadElem> xs{QuadElem(f, 1393, -985), QuadElem(f, 3363, -2378), QuadElem(f, 7, -5)};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sign(xs[i++ % xs.size()]));
}
BENCHMARK(BM_QuadSign);

void BM_SaddleConnectionsOctagon(benchmark::State& state) {
  const auto s = fixtures::regular_octagon();
  const QuadElem bound(s.field(), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(saddle_connections(s, bound));
}
BENCHMARK(BM_SaddleConnectionsOctagon)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DecomposeOctagon(benchmark::State& state) {
  const auto s = fixtures::regular_octagon();
  const QuadraticField f(2);
  const Vec2 dir(QuadElem(f, 1), QuadElem(f, 1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(s, dir));
}
BENCHMARK(BM_DecomposeOctagon)->Unit(benchmark::kMillisecond);

void BM_DecomposeCandidate(benchmark::State& state) {
  const Table1Row& row = table1_rows()[2];
  CandidateSpec spec;
  spec.model = "6";
  spec.radicand = row.radicand;
  spec.w2 = row.w2;
  spec.h2 = row.h2;
  spec.t1 = QuadElem(QuadraticField(3), Rational(1, 12));
  spec.t2 = Rational(1, 3) * row.w2;
  spec.s = QuadElem(QuadraticField(3), Rational(3, 4), Rational(-1, 4));
  const auto s = build_candidate(spec);
  const QuadraticField f(3);
  const Vec2 dir(QuadElem(f, 1), QuadElem(f, 12));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(s, dir));
}
BENCHMARK(BM_DecomposeCandidate)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
