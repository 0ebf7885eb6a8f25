// Serial reference vs OpenMP kernels on solver-shaped workloads.

#include "fredholm/compute.hpp"
#include "fredholm/demos.hpp"
#include "fredholm/fpt.hpp"
#include "fredholm/rng.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace fredholm;

namespace {

struct MatvecFixture {
    std::size_t rows, cols;
    std::vector<double> a, wp, wr, out_r, out_c;

    MatvecFixture(std::size_t r, std::size_t c) : rows(r), cols(c) {
        Rng rng(42);
        a.resize(rows * cols);
        for (auto& v : a) v = rng.uniform();
        wp.resize(cols);
        for (auto& v : wp) v = rng.uniform();
        wr.resize(rows);
        for (auto& v : wr) v = rng.uniform();
        out_r.resize(rows);
        out_c.resize(cols);
    }
};

void bm_matvec_rows_serial(benchmark::State& state) {
    MatvecFixture f(2001, 2001);
    for (auto _ : state) {
        compute::serial::matvec_rows(f.a, f.rows, f.cols, f.wp, f.out_r);
        benchmark::DoNotOptimize(f.out_r.data());
    }
}

void bm_matvec_rows_omp(benchmark::State& state) {
    MatvecFixture f(2001, 2001);
    for (auto _ : state) {
        compute::matvec_rows(f.a, f.rows, f.cols, f.wp, f.out_r);
        benchmark::DoNotOptimize(f.out_r.data());
    }
}

void bm_matvec_cols_serial(benchmark::State& state) {
    MatvecFixture f(2001, 2001);
    for (auto _ : state) {
        compute::serial::matvec_cols(f.a, f.rows, f.cols, f.wr, f.out_c);
        benchmark::DoNotOptimize(f.out_c.data());
    }
}

void bm_matvec_cols_omp(benchmark::State& state) {
    MatvecFixture f(2001, 2001);
    for (auto _ : state) {
        compute::matvec_cols(f.a, f.rows, f.cols, f.wr, f.out_c);
        benchmark::DoNotOptimize(f.out_c.data());
    }
}

void bm_kde_serial(benchmark::State& state) {
    Rng rng(7);
    std::vector<double> xs(300), nodes(1001), out(1001);
    for (auto& v : xs) v = rng.uniform();
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = -0.2 + 1.4 * i / 1000.0;
    for (auto _ : state) {
        compute::serial::kde_sum(xs, 1.0 / 0.05, 1.0 / (300 * 0.05), nodes, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_kde_omp(benchmark::State& state) {
    Rng rng(7);
    std::vector<double> xs(300), nodes(1001), out(1001);
    for (auto& v : xs) v = rng.uniform();
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = -0.2 + 1.4 * i / 1000.0;
    for (auto _ : state) {
        compute::kde_sum(xs, 1.0 / 0.05, 1.0 / (300 * 0.05), nodes, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_mc_update_step(benchmark::State& state) {
    FPTProblem problem = demos::make_fpt_sqrt(0);
    GridFunction p = normalize_to_density(problem.p0);
    std::uint64_t iter = 1;
    for (auto _ : state) {
        p = mc_update_step(problem, p, iter++);
        benchmark::DoNotOptimize(p.values.data());
    }
}

void bm_simulate_paths(benchmark::State& state) {
    const BoundarySpec boundary = sqrt_boundary(1.0, 0.1);
    for (auto _ : state) {
        auto sim = simulate_fpt(boundary, 2000, 1e-3, 50.0, 1);
        benchmark::DoNotOptimize(sim.hitting_times.data());
    }
}

} // namespace

BENCHMARK(bm_matvec_rows_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_matvec_rows_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_matvec_cols_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_matvec_cols_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_kde_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_kde_omp)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_mc_update_step)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_simulate_paths)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
