#include <benchmark/benchmark.h>

#include "hmpii/collocation.hpp"
#include "hmpii/genus0.hpp"
#include "hmpii/genus1.hpp"
#include "hmpii/pade_vault.hpp"
#include "hmpii/theta.hpp"

using namespace hmpii;

static void BM_SolveS(benchmark::State& st) {
    cplx x(-1.2, 0.7);
    for (auto _ : st) benchmark::DoNotOptimize(solve_S(x));
}
BENCHMARK(BM_SolveS);

static void BM_Genus0Value(benchmark::State& st) {
    cplx x(0.8, -1.1);
    for (auto _ : st) benchmark::DoNotOptimize(genus0_value(x));
}
BENCHMARK(BM_Genus0Value);

static void BM_FrakC(benchmark::State& st) {
    cplx x(-0.5, -2.0);
    for (auto _ : st) benchmark::DoNotOptimize(frak_c(x));
}
BENCHMARK(BM_FrakC);

static void BM_SolveEndpoints(benchmark::State& st) {
    cplx x(-1.5, -10.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve_endpoints(x));
}
BENCHMARK(BM_SolveEndpoints)->Unit(benchmark::kMillisecond);

static void BM_Genus1State(benchmark::State& st) {
    EndpointSet e = solve_endpoints(cplx(-1.5, -10.0));
    for (auto _ : st) benchmark::DoNotOptimize(genus1_state(e));
}
BENCHMARK(BM_Genus1State)->Unit(benchmark::kMillisecond);

static void BM_Genus1Formula(benchmark::State& st) {
    Genus1State s = genus1_state(solve_endpoints(cplx(-1.5, -10.0)));
    double k = 0.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(genus1_formula(s, k));
        k += 1.0;
    }
}
BENCHMARK(BM_Genus1Formula);

static void BM_Theta(benchmark::State& st) {
    ThetaParams p{cplx(-2.5, 1.3)};
    cplx z(0.7, -3.0);
    for (auto _ : st) benchmark::DoNotOptimize(theta(z, p));
}
BENCHMARK(BM_Theta);

static void BM_BuildGrid(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_grid(int(st.range(0))));
}
BENCHMARK(BM_BuildGrid)->Arg(50)->Arg(200);

static void BM_SolveBvp(benchmark::State& st) {
    BvpProblem p;
    p.N = int(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(solve_bvp(p));
}
BENCHMARK(BM_SolveBvp)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_TaylorPade(benchmark::State& st) {
    cplx u0(0.909099054021), u1(-0.180376457113);
    for (auto _ : st) {
        TaylorJet j = taylor_from_ivp(0.0, u0, u1, 1.5, 24);
        benchmark::DoNotOptimize(pade_from_taylor(j));
    }
}
BENCHMARK(BM_TaylorPade);

static void BM_Vault(benchmark::State& st) {
    cplx u0(0.909099054021), u1(-0.180376457113);
    for (auto _ : st) benchmark::DoNotOptimize(run_vault({-2.0, 2.0, -2.0, 2.0}, 0.0, u0, u1, 1.5));
}
BENCHMARK(BM_Vault)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
