#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhs/gridmeasure.hpp"
#include "nhs/korner.hpp"
#include "nhs/l0approx.hpp"
#include "nhs/rho.hpp"
#include "nhs/trigpoly.hpp"

namespace {

nhs::TrigPoly random_poly(std::size_t terms, double fmax, bool integer, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> f(-fmax, fmax), c(-1.0, 1.0);
  std::vector<nhs::Term> t;
  for (std::size_t i = 0; i < terms; ++i) {
    const double nu = integer ? std::round(f(rng)) : f(rng);
    t.push_back({nu, {c(rng), c(rng)}});
  }
  return nhs::TrigPoly(std::move(t));
}

void BM_Evaluate(benchmark::State& state) {
  const auto p = random_poly(static_cast<std::size_t>(state.range(0)), 50.0, false, 1);
  const auto g = nhs::SampleGrid::window(4.0, 4096);
  for (auto _ : state) benchmark::DoNotOptimize(nhs::evaluate(p, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.size()) * g.count);
}
BENCHMARK(BM_Evaluate)->Arg(16)->Arg(128)->Arg(1024);

void BM_MaximalFunction(benchmark::State& state) {
  const auto p = random_poly(static_cast<std::size_t>(state.range(0)), 50.0, false, 2);
  const auto g = nhs::SampleGrid::circle(4096);
  for (auto _ : state) benchmark::DoNotOptimize(nhs::maximal_function(p, g));
}
BENCHMARK(BM_MaximalFunction)->Arg(16)->Arg(128);

void BM_UNormIntegerSpectrum(benchmark::State& state) {
  const auto p = random_poly(static_cast<std::size_t>(state.range(0)), 2000.0, true, 3);
  const auto g = nhs::SampleGrid::circle(nhs::kUNormPointsPer2Pi);
  for (auto _ : state) benchmark::DoNotOptimize(nhs::u_norm_estimate(p, g));
}
BENCHMARK(BM_UNormIntegerSpectrum)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ApproximateInMeasure(benchmark::State& state) {
  const auto cap = state.range(0);
  const auto g = nhs::SampleGrid::make(-std::numbers::pi, std::numbers::pi, std::max<std::int64_t>(1024, 8 * cap));
  std::vector<nhs::cplx> target;
  for (double x : g.points()) target.push_back(x > 0.0 ? 1.0 : 0.0);
  const auto pool = nhs::materialize_pool(nhs::RhoRule::one_over_k_plus_2(), 2, cap);
  for (auto _ : state) benchmark::DoNotOptimize(nhs::approximate_in_measure(target, g, pool, 0.2, 0.3));
}
BENCHMARK(BM_ApproximateInMeasure)->Arg(30)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_KornerGenerate(benchmark::State& state) {
  nhs::KornerParams prm;
  prm.epsilon = 0.5;
  prm.delta = state.range(0) == 0 ? 0.5 : 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(nhs::generate(prm));
}
BENCHMARK(BM_KornerGenerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Exceedance(benchmark::State& state) {
  const auto g = nhs::SampleGrid::window(8.0, 4096);
  const auto p = random_poly(32, 20.0, false, 4);
  const auto v = nhs::evaluate(p, g);
  for (auto _ : state) benchmark::DoNotOptimize(nhs::exceedance_measure(std::span<const nhs::cplx>(v), g, 1.0));
}
BENCHMARK(BM_Exceedance);

}  // namespace

BENCHMARK_MAIN();
