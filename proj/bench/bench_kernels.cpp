#include "stabkit/metrics.hpp"

#include <benchmark/benchmark.h>

using namespace stabkit;

namespace {

// A non-diagonal Hermitian form on H0(O(4)), so integrals need the full (u, θ) grid.
FubiniStudyPotential skewed() {
    CMatrix H = CMatrix::Identity(5, 5);
    H(0, 1) = H(1, 0) = 0.2;
    H(2, 4) = {0.1, 0.05};
    H(4, 2) = std::conj(H(2, 4));
    return FubiniStudyPotential(4, H);
}

MetricOptions options(Exec e) {
    MetricOptions o;
    o.exec = e;
    return o;
}

template <Exec E>
void gram_radial(benchmark::State& st) {
    const auto phi = RadialPotential::bump(0.3);
    const int r = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(gram(phi, r, options(E)));
}

template <Exec E>
void gram_grid(benchmark::State& st) {
    const auto phi = skewed();
    const int r = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(gram(phi, r, options(E)));
}

template <Exec E>
void bergman_grid(benchmark::State& st) {
    const auto phi = skewed();
    const int r = static_cast<int>(st.range(0));
    const CMatrix G = gram(phi, r);
    for (auto _ : st) benchmark::DoNotOptimize(bergman(phi, G, r, options(E)).integral());
}

template <Exec E>
void t_op(benchmark::State& st) {
    const int r = static_cast<int>(st.range(0));
    const CMatrix G = normalize_det(gram(RadialPotential::bump(0.3), r));
    for (auto _ : st) benchmark::DoNotOptimize(t_operator(r, G, options(E)));
}

} // namespace

BENCHMARK(gram_radial<Exec::Serial>)->Arg(12)->Arg(24)->Arg(48);
BENCHMARK(gram_radial<Exec::Parallel>)->Arg(12)->Arg(24)->Arg(48);
BENCHMARK(gram_grid<Exec::Serial>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(gram_grid<Exec::Parallel>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bergman_grid<Exec::Serial>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bergman_grid<Exec::Parallel>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(t_op<Exec::Serial>)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(t_op<Exec::Parallel>)->Arg(8)->Arg(16)->Arg(24);

BENCHMARK_MAIN();
