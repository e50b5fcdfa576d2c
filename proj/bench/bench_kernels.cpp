// Serial reference against OpenMP variant for each parallel kernel.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "johnwalk/corpus.hpp"
#include "johnwalk/diagnostics.hpp"
#include "johnwalk/kernels.hpp"
#include "johnwalk/walk.hpp"

using namespace johnwalk;

namespace {

kernels::Exec exec_of(const benchmark::State& s) { return s.range(0) ? kernels::Exec::parallel : kernels::Exec::serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "omp" : "serial"); }

void BM_row_quadratic_forms(benchmark::State& state) {
    const Index m = state.range(1), n = 20;
    walk::Rng rng = walk::make_rng(1);
    std::normal_distribution<double> g;
    Mat A(m, n), B(n, n);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
    for (Index i = 0; i < B.size(); ++i) B.data()[i] = g(rng);
    const Mat G = B * B.transpose();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::row_quadratic_forms(A, G, exec_of(state)));
    label(state);
}
BENCHMARK(BM_row_quadratic_forms)->ArgsProduct({{0, 1}, {1000, 100000}});

void BM_autocovariance(benchmark::State& state) {
    walk::Rng rng = walk::make_rng(2);
    std::normal_distribution<double> g;
    std::vector<double> x(std::size_t(state.range(1)));
    for (auto& v : x) v = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::autocovariance(x, 512, exec_of(state)));
    label(state);
}
BENCHMARK(BM_autocovariance)->ArgsProduct({{0, 1}, {10000, 200000}});

void BM_autocovariance_fft(benchmark::State& state) {
    walk::Rng rng = walk::make_rng(2);
    std::normal_distribution<double> g;
    std::vector<double> x(std::size_t(state.range(0)));
    for (auto& v : x) v = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::autocovariance_fft(x, 512));
}
BENCHMARK(BM_autocovariance_fft)->Arg(10000)->Arg(200000);

void BM_run_chains(benchmark::State& state) {
    const Polytope P = corpus::simplex(3);
    walk::WalkConfig cfg;
    cfg.c = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(walk::run_chains(P, Vec::Zero(3), 200, 4, cfg, exec_of(state)));
    label(state);
}
BENCHMARK(BM_run_chains)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_check_step_lemmas(benchmark::State& state) {
    const Polytope P = corpus::cube(4);
    diagnostics::LemmaOptions opt;
    opt.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(diagnostics::check_step_lemmas(P, Vec::Zero(4), 64, opt));
    label(state);
}
BENCHMARK(BM_check_step_lemmas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
