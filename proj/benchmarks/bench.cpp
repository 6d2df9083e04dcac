#include <benchmark/benchmark.h>

#include "ncc/dilation.hpp"
#include "ncc/envelope.hpp"
#include "ncc/linalg.hpp"
#include "ncc/rng.hpp"

namespace {

void bm_kron(benchmark::State& state) {
    ncc::Rng rng(1);
    const int n = static_cast<int>(state.range(0));
    ncc::CMat a = rng.cmatrix(n, n), b = rng.cmatrix(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(ncc::kron(a, b));
}
BENCHMARK(bm_kron)->Arg(8)->Arg(16);

void bm_commutant(benchmark::State& state) {
    ncc::Rng rng(2);
    const int n = static_cast<int>(state.range(0));
    std::vector<ncc::CMat> mats = {rng.hermitian(n), rng.hermitian(n)};
    ncc::Tolerances tol;
    for (auto _ : state) benchmark::DoNotOptimize(ncc::commutant_dim(mats, tol));
}
BENCHMARK(bm_commutant)->Arg(4)->Arg(8);

// interior-point solve of a random feasibility-with-objective problem:
// minimize <C, X> over X >= 0 with tr(X) = 1
void bm_sdp_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ncc::Rng rng(3);
    ncc::CMat c = rng.hermitian(n);
    ncc::SdpProblem prob;
    prob.add_block("x", n);
    ncc::SdpConstraint tr;
    for (int i = 0; i < n; ++i) tr.terms.push_back({0, i, i, 1.0});
    tr.rhs = 1.0;
    prob.add_constraint(tr);
    std::vector<ncc::SdpTerm> obj;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) obj.push_back({0, i, j, c(j, i)});
    prob.set_objective(std::move(obj));
    ncc::Tolerances tol;
    for (auto _ : state) benchmark::DoNotOptimize(ncc::solve_sdp(prob, tol));
}
BENCHMARK(bm_sdp_solve)->Arg(8)->Arg(16)->Arg(32);

void bm_membership_row_ball(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    ncc::NcSet k = ncc::row_ball_set(2);
    ncc::Rng rng(4);
    ncc::NcPoint x = ncc::sample_member(k, level, rng, 0.6);
    for (auto _ : state) benchmark::DoNotOptimize(ncc::membership(k, x));
}
BENCHMARK(bm_membership_row_ball)->Arg(1)->Arg(3)->Arg(6);

void bm_one_step_dilation(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    ncc::NcSet k = ncc::interval_set(-1, 1);
    ncc::Rng rng(5);
    ncc::NcPoint x = ncc::sample_member(k, level, rng, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(ncc::find_one_step_dilation(k, x));
}
BENCHMARK(bm_one_step_dilation)->Arg(1)->Arg(2)->Arg(4);

void bm_envelope_cube(benchmark::State& state) {
    const int relax = static_cast<int>(state.range(0));
    ncc::NcSet k = ncc::interval_set(-1, 1);
    ncc::FreePoly x1 = ncc::FreePoly::letter(1, 0);
    ncc::FreePoly x3 = ncc::multiply(ncc::multiply(x1, x1), x1);
    ncc::NcPoint zero = ncc::NcPoint::scalar({ncc::Complex(0, 0)});
    for (auto _ : state)
        benchmark::DoNotOptimize(ncc::convex_envelope(k, x3, zero, relax));
}
BENCHMARK(bm_envelope_cube)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
