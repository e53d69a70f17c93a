#include <benchmark/benchmark.h>

#include <random>

#include "qtherm/cooling_coherent.hpp"
#include "qtherm/cooling_incoherent.hpp"
#include "qtherm/correlations.hpp"
#include "qtherm/majorization.hpp"

using namespace qtherm;

namespace {

Vec random_simplex(int d, std::mt19937_64& gen) {
    std::exponential_distribution<double> exp1(1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i)
        v(i) = exp1(gen);
    return v / v.sum();
}

RMat random_doubly_stochastic(int d, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RMat m = RMat::Zero(d, d);
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
        std::vector<int> perm(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i)
            perm[static_cast<size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), gen);
        const double w = u01(gen) + 1e-2;
        m += w * permutation_matrix(perm);
        total += w;
    }
    return m / total;
}

} // namespace

static void BM_haar_random_unitary(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(haar_random_unitary(d, seed++));
}
BENCHMARK(BM_haar_random_unitary)->Arg(4)->Arg(8)->Arg(16);

static void BM_horn_transfer(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::mt19937_64 gen(3);
    const Vec y = random_simplex(d, gen);
    const Vec x = random_doubly_stochastic(d, gen) * y;
    for (auto _ : state)
        benchmark::DoNotOptimize(horn_transfer(x, y));
}
BENCHMARK(BM_horn_transfer)->Arg(4)->Arg(8);

static void BM_birkhoff_decompose(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::mt19937_64 gen(5);
    const RMat m = random_doubly_stochastic(d, gen);
    for (auto _ : state)
        benchmark::DoNotOptimize(birkhoff_decompose(m));
}
BENCHMARK(BM_birkhoff_decompose)->Arg(4)->Arg(8);

static void BM_protocol_a_step(benchmark::State& state) {
    Hamiltonian system({0.0, 0.3, 0.8, 1.2});
    MachineSpec machine{Hamiltonian({0.0, 0.4, 0.9, 1.3, 1.8, 2.2}), Beta(1.0)};
    const Vec sigma = gibbs_populations(system, Beta(1.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(protocol_a_step(sigma, machine));
}
BENCHMARK(BM_protocol_a_step);

static void BM_incoherent_cycle(benchmark::State& state) {
    Hamiltonian sys({0.0, 1.0});
    std::vector<Hamiltonian> machine{Hamiltonian::qubit(1.4), Hamiltonian::qubit(0.4)};
    IncoherentCycleRunner runner(sys, machine, BathAssignment{{1}}, Beta(1.0), Beta(0.2));
    Mat swap_u = Mat::Identity(8, 8);
    swap_u(2, 2) = swap_u(5, 5) = 0;
    swap_u(2, 5) = swap_u(5, 2) = 1;
    Vec sigma = gibbs_populations(sys, Beta(1.0));
    for (auto _ : state) {
        auto res = runner.step(sigma, swap_u);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_incoherent_cycle);

static void BM_stu_geometric_d3(benchmark::State& state) {
    Hamiltonian h({0.0, 0.7, 1.5});
    for (auto _ : state)
        benchmark::DoNotOptimize(stu_geometric(h, Beta(1.0), Beta(0.4)));
}
BENCHMARK(BM_stu_geometric_d3);

static void BM_stu_geometric_d4(benchmark::State& state) {
    Hamiltonian h({0.0, 0.5, 1.5, 3.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(stu_geometric(h, Beta(1.0), Beta(0.4)));
}
BENCHMARK(BM_stu_geometric_d4);

static void BM_build_stu_unitary_d4(benchmark::State& state) {
    Hamiltonian h({0.0, 1.5, 2.5, 3.0});
    const StuCertificate cert = stu_passing_norm(h, Beta(1.0), Beta(0.4));
    const BlockDecomposition blocks = latin_blocks(h, Beta(1.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_stu_unitary(cert, blocks));
}
BENCHMARK(BM_build_stu_unitary_d4);

static void BM_polytope_membership(benchmark::State& state) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Vec> vertices;
    for (int k = 0; k < 40; ++k) {
        Vec v(3);
        for (int i = 0; i < 3; ++i)
            v(i) = u01(gen);
        vertices.push_back(v);
    }
    Vec target = Vec::Zero(3);
    for (const Vec& v : vertices)
        target += v / 40.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(polytope_membership(target, vertices));
}
BENCHMARK(BM_polytope_membership);

BENCHMARK_MAIN();
