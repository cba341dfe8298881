// Microbenchmarks for the hot paths: the closure step (called millions of
// times per scan), the root solve (once per grid cell), and the sampling
// kernels (once per trajectory step). Run with --benchmark_filter=... to
// isolate one.

#include <benchmark/benchmark.h>

#include <ricker/equilibrium.hpp>
#include <ricker/gamma_kernels.hpp>
#include <ricker/moment_map.hpp>
#include <ricker/montecarlo.hpp>
#include <ricker/rng.hpp>
#include <ricker/scan.hpp>

namespace {

void bm_laplace_moment(benchmark::State& state) {
    double tau = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ricker::laplace_moment(0.6, 0.65, tau, 1));
        tau = tau < 3.0 ? tau + 1e-9 : 0.1;
    }
}
BENCHMARK(bm_laplace_moment);

void bm_step(benchmark::State& state) {
    ricker::MomentState x{0.5, 0.02};
    const ricker::Params p{1.5, 2.0};
    for (auto _ : state) {
        const auto out = ricker::step(x, p);
        benchmark::DoNotOptimize(out);
        x = out.next ? *out.next : ricker::MomentState{0.5, 0.02};
    }
}
BENCHMARK(bm_step);

void bm_solve_fast_bracket(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(ricker::solve_equilibrium({1.5, 2.0}));
}
BENCHMARK(bm_solve_fast_bracket);

void bm_solve_grid_scan(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(ricker::solve_equilibrium({1.0, 3.0}));
}
BENCHMARK(bm_solve_grid_scan);

void bm_phi_second(benchmark::State& state) {
    double z = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricker::phi_second(z));
        z = z < 100.0 ? z * 1.001 : 1e-3;
    }
}
BENCHMARK(bm_phi_second);

void bm_h_func(benchmark::State& state) {
    double z = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricker::h_func(z));
        z = z < 100.0 ? z * 1.001 : 1e-3;
    }
}
BENCHMARK(bm_h_func);

void bm_q_func(benchmark::State& state) {
    double z = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricker::q_func(z));
        z = z < 100.0 ? z * 1.001 : 1e-3;
    }
}
BENCHMARK(bm_q_func);

void bm_log_gamma(benchmark::State& state) {
    double x = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ricker::log_gamma(x));
        x = x < 150.0 ? x * 1.01 : 0.5;
    }
}
BENCHMARK(bm_log_gamma);

void bm_sample_gamma(benchmark::State& state) {
    ricker::Xoshiro256pp rng(7);
    const auto shape = ricker::gamma_from_moments(0.6, 0.65);
    for (auto _ : state)
        benchmark::DoNotOptimize(ricker::sample_gamma(shape, rng));
}
BENCHMARK(bm_sample_gamma);

void bm_sample_lognormal(benchmark::State& state) {
    ricker::Xoshiro256pp rng(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(ricker::sample_lognormal_noise(1.1, rng));
}
BENCHMARK(bm_sample_lognormal);

void bm_run_ensemble_small(benchmark::State& state) {
    ricker::EnsembleConfig cfg;
    cfg.p = {1.39, 1.10};
    cfg.n_ens = 2000;
    cfg.t_max = 200;
    cfg.transient = 100;
    cfg.collect = 50;
    cfg.conv_window = 50;
    for (auto _ : state)
        benchmark::DoNotOptimize(ricker::run_ensemble(cfg));
}
BENCHMARK(bm_run_ensemble_small)->Unit(benchmark::kMillisecond);

void bm_existence_scan_small(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ricker::existence_scan(0.5, 10.0, 1.05, 4.5, 20, 20));
}
BENCHMARK(bm_existence_scan_small)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
