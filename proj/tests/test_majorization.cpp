#include <doctest.h>

#include "test_support.hpp"

#include <cmath>
#include <random>

#include "qtherm/majorization.hpp"
#include "qtherm/spectra.hpp"

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
    // Convex mix of a handful of random permutations.
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RMat m = RMat::Zero(d, d);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        std::vector<int> perm(d);
        for (int i = 0; i < d; ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), gen);
        const double w = u01(gen) + 1e-3;
        m += w * permutation_matrix(perm);
        total += w;
    }
    return m / total;
}

} // namespace

TEST_CASE("majorizes on the reference cases") {
    Vec x(2), y(2);
    x << 1, 0;
    y << 0.5, 0.5;
    CHECK(majorizes(x, y));
    CHECK_FALSE(majorizes(y, x));
    CHECK(majorizes(x, x));

    Vec a(3), b(3);
    a << 0.5, 0.3, 0.2;
    b << 0.4, 0.4, 0.2;
    CHECK(majorizes(a, b)); // partial sums 0.5 >= 0.4, 0.8 >= 0.8
    CHECK_FALSE(majorizes(b, a));

    Vec c(3);
    c << 0.5, 0.3, 0.1;
    MajorizationResult r = majorizes(a, c);
    CHECK_FALSE(r.holds);
    CHECK(r.sum_mismatch);
}

TEST_CASE("sum_compare prefix order") {
    Vec p(2), q(2);
    p << 0.9, 0.1;
    q << 0.6, 0.4;
    CHECK(sum_compare(p, q) == SumOrder::Colder);
    CHECK(sum_compare(q, p) == SumOrder::Hotter);
    CHECK(sum_compare(p, p) == SumOrder::Equal);

    Vec a(3), b(3);
    a << 0.5, 0.1, 0.4;
    b << 0.4, 0.3, 0.3;
    CHECK(sum_compare(a, b) == SumOrder::Incomparable); // 0.5 > 0.4 but 0.6 < 0.7
}

TEST_CASE("sum_compare transitivity on random triples") {
    std::mt19937_64 gen(7);
    int checked = 0;
    while (checked < 200) {
        Vec a = random_simplex(4, gen);
        Vec b = random_simplex(4, gen);
        Vec c = random_simplex(4, gen);
        if (sum_compare(a, b) == SumOrder::Colder && sum_compare(b, c) == SumOrder::Colder) {
            CHECK(sum_compare(a, c) == SumOrder::Colder);
            ++checked;
        }
        // Colder implies lower average energy against every sorted spectrum.
        if (sum_compare(a, b) == SumOrder::Colder) {
            Hamiltonian h({0.0, 0.3, 1.1, 2.0});
            CHECK(average_energy(a, h) <= average_energy(b, h) + 1e-10);
        }
    }
}

TEST_CASE("t_transform endpoints") {
    CHECK((t_transform(0.0, 0, 1, 3) - RMat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    RMat full = t_transform(1.0, 0, 1, 2);
    Vec e0(2);
    e0 << 1, 0;
    Vec swapped = full * e0;
    CHECK(swapped(0) == 0.0);
    CHECK(swapped(1) == 1.0);

    Vec half = t_transform(0.5, 0, 1, 2) * e0;
    CHECK(half(0) == doctest::Approx(0.5));
    CHECK(half(1) == doctest::Approx(0.5));

    CHECK_THROWS_AS(t_transform(0.5, 0, 0, 2), UnsupportedError);
    CHECK_THROWS_AS(t_transform(1.5, 0, 1, 2), UnsupportedError);
}

TEST_CASE("horn_transfer reference cases") {
    Vec y(2), x(2);
    y << 0.5, 0.5;
    x << 0.5, 0.5;
    HornTransfer id = horn_transfer(x, y);
    CHECK((id.matrix - RMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(id.chain.empty());

    y << 1.0, 0.0;
    x << 0.7, 0.3;
    HornTransfer t = horn_transfer(x, y);
    CHECK(t.chain.size() == 1);
    CHECK(t.chain[0].t == doctest::Approx(0.3));
    CHECK((t.matrix * y - x).cwiseAbs().maxCoeff() < 1e-14);

    Vec y3(3), x3(3);
    y3 << 0.5, 0.3, 0.2;
    x3 << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    HornTransfer t3 = horn_transfer(x3, y3);
    validate_doubly_stochastic(t3.matrix);
    CHECK((t3.matrix * y3 - x3).cwiseAbs().maxCoeff() < 1e-12);

    // Violated precondition carries the first bad prefix.
    CHECK_THROWS_AS(horn_transfer(y3, x3), MajorizationError);
}

TEST_CASE("horn_transfer property sweep with unitary witness") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + static_cast<int>(gen() % 7);
        Vec y = random_simplex(d, gen);
        RMat m = random_doubly_stochastic(d, gen);
        Vec x = m * y; // guaranteed x majorized by y
        HornTransfer t = horn_transfer(x, y);
        validate_doubly_stochastic(t.matrix);
        CHECK((t.matrix * y - x).cwiseAbs().maxCoeff() < 1e-10);
        // d-1 links when source and target are similarly ordered, up to twice
        // that when a pre-sorting pass is needed.
        CHECK(static_cast<int>(t.chain.size()) <= 2 * (d - 1));
        HornTransfer sorted_pair = horn_transfer(passive_sort(x), passive_sort(y));
        CHECK(static_cast<int>(sorted_pair.chain.size()) <= d - 1);
        CHECK((sorted_pair.matrix * passive_sort(y) - passive_sort(x)).cwiseAbs().maxCoeff() < 1e-10);

        // The rotation-product witness maps y to x through its squared moduli.
        RMat u = horn_unitary(t, d);
        CHECK((u * u.transpose() - RMat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        Vec via_moduli = (u.array().square().matrix()) * y;
        CHECK((via_moduli - x).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("hardy-littlewood-polya round trip") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + static_cast<int>(gen() % 7);
        Vec y = random_simplex(d, gen);
        RMat m = random_doubly_stochastic(d, gen);
        CHECK(majorizes(y, m * y));
    }
}

TEST_CASE("birkhoff reference cases") {
    auto terms = birkhoff_decompose(RMat::Identity(3, 3));
    CHECK(terms.size() == 1);
    CHECK(terms[0].weight == doctest::Approx(1.0));
    CHECK(terms[0].permutation == std::vector<int>({0, 1, 2}));

    RMat cycle = permutation_matrix({1, 2, 0});
    RMat mix = 0.5 * RMat::Identity(3, 3) + 0.5 * cycle;
    auto two = birkhoff_decompose(mix);
    CHECK(two.size() == 2);
    CHECK(two[0].weight == doctest::Approx(0.5));
    CHECK(two[1].weight == doctest::Approx(0.5));
}

TEST_CASE("birkhoff reconstruction over random instances") {
    std::mt19937_64 gen(321);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + static_cast<int>(gen() % 7);
        RMat m = random_doubly_stochastic(d, gen);
        auto terms = birkhoff_decompose(m);
        CHECK(static_cast<int>(terms.size()) <= (d - 1) * (d - 1) + 1);
        RMat rebuilt = RMat::Zero(d, d);
        double wsum = 0.0;
        for (const auto& term : terms) {
            CHECK(term.weight >= 0.0);
            rebuilt += term.weight * permutation_matrix(term.permutation);
            wsum += term.weight;
        }
        CHECK(std::abs(wsum - 1.0) < 1e-10);
        CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("passive sort") {
    Vec p(3);
    p << 0.2, 0.5, 0.3;
    Vec s = passive_sort(p);
    CHECK(s(0) == 0.5);
    CHECK(s(1) == 0.3);
    CHECK(s(2) == 0.2);

    Vec sorted(3);
    sorted << 0.5, 0.3, 0.2;
    CHECK((passive_sort(sorted) - sorted).cwiseAbs().maxCoeff() == 0.0);

    Vec equal = Vec::Constant(4, 0.25);
    CHECK((passive_sort(equal) - equal).cwiseAbs().maxCoeff() == 0.0);

    // Stability: ties keep original order.
    Vec tie(4);
    tie << 0.1, 0.4, 0.4, 0.1;
    auto ord = descending_order(tie);
    CHECK(ord == std::vector<int>({1, 2, 0, 3}));
}

TEST_CASE("spectrum of a matrix is sumcolder than its diagonal after sorting") {
    // Descending eigenvalues vs the diagonal of any hermitian state.
    std::mt19937_64 gen(777);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 3 + static_cast<int>(gen() % 4);
        Vec p = random_simplex(d, gen);
        Mat u = haar_random_unitary(d, 50000 + static_cast<std::uint64_t>(trial));
        Mat rho = apply_unitary(diagonal_state(p), u);
        Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
        Vec lam_desc = es.eigenvalues().reverse();
        CHECK(sum_compare(lam_desc, diag_of(rho)) != SumOrder::Hotter);
        CHECK(sum_compare(lam_desc, diag_of(rho)) != SumOrder::Incomparable);
    }
}
