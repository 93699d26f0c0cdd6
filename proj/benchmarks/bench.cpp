#include <benchmark/benchmark.h>

#include "wander/family.hpp"
#include "wander/skeleton.hpp"

using namespace wander;
using padic::FieldContext;

namespace {

const skeleton::RadiiConfig kDemo{2, {2, 4, 7, 12}, 0};

void BM_phi_iteration(benchmark::State& state) {
  for (auto _ : state) {
    Rat q = Rat(-1, 3);
    for (int i = 0; i < 100; ++i) {
      q = skeleton::phi_log(kDemo, q);
      if (q > kDemo.q(4)) q = Rat(-1, 3);
    }
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_phi_iteration);

void BM_padic_mul(benchmark::State& state) {
  auto ctx = FieldContext::base(2, static_cast<long>(state.range(0)));
  const auto x = padic::random_with_valuation(ctx, -3, 1);
  const auto y = padic::random_with_valuation(ctx, 2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(x * y);
  }
}
BENCHMARK(BM_padic_mul)->Arg(64)->Arg(400)->Arg(2000);

void BM_eval_f(benchmark::State& state) {
  auto ctx = FieldContext::base(2, static_cast<long>(state.range(0)));
  const auto c = family::random_parameters(ctx, kDemo, 42);
  const auto z = padic::random_with_valuation(ctx, -3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(family::eval_f(c, z).value);
  }
}
BENCHMARK(BM_eval_f)->Arg(64)->Arg(400);

void BM_inverse_orbit_step(benchmark::State& state) {
  auto ctx = FieldContext::base(2, 400);
  const auto c = family::random_parameters(ctx, kDemo, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(family::inverse_orbit(c, 1, 2, 200));
  }
}
BENCHMARK(BM_inverse_orbit_step);

}  // namespace

BENCHMARK_MAIN();
