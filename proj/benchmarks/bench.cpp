#include <benchmark/benchmark.h>

#include <random>

#include "collusion/core.hpp"
#include "collusion/fisher.hpp"
#include "collusion/incentives.hpp"
#include "collusion/instances.hpp"
#include "collusion/mechanisms.hpp"

using namespace collusion;

namespace {

OrdinalProfile random_profile(int n, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    OrdinalProfile profile;
    profile.orderings.assign(n, std::vector<int>(m));
    for (auto& ord : profile.orderings) {
        std::iota(ord.begin(), ord.end(), 0);
        std::shuffle(ord.begin(), ord.end(), rng);
    }
    return profile;
}

void BM_RoundRobin(benchmark::State& state) {
    int n = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
    auto profile = random_profile(n, m, 1);
    for (auto _ : state) benchmark::DoNotOptimize(round_robin(profile, n, m));
}
BENCHMARK(BM_RoundRobin)->Args({3, 9})->Args({5, 20});

void BM_ProbabilisticSerial(benchmark::State& state) {
    int n = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
    auto profile = random_profile(n, m, 2);
    for (auto _ : state) benchmark::DoNotOptimize(probabilistic_serial(profile, n, m));
}
BENCHMARK(BM_ProbabilisticSerial)->Args({3, 6})->Args({4, 10});

void BM_PsViaRr(benchmark::State& state) {
    int n = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
    auto profile = random_profile(n, m, 3);
    for (auto _ : state) benchmark::DoNotOptimize(ps_via_rr(profile, n, m));
}
BENCHMARK(BM_PsViaRr)->Args({2, 4})->Args({3, 5});

void BM_ProportionalResponse(benchmark::State& state) {
    auto inst = random_instance(static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(1)),
                                ValuationFamily::UniformRational, 4);
    for (auto& row : inst.valuations)
        for (auto& v : row)
            if (v == 0) v = Rational(1, 100);
    for (auto _ : state) benchmark::DoNotOptimize(fisher::proportional_response_solve(inst));
}
BENCHMARK(BM_ProportionalResponse)->Args({3, 3})->Args({5, 8});

void BM_ExhaustiveSearch(benchmark::State& state) {
    auto inst = random_instance(3, 3, ValuationFamily::Binary, 5);
    int c = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(exhaustive_search(OrdinalMechanism::PS, inst, c));
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
