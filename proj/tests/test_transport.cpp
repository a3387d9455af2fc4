#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "otabc/transport.hpp"

using namespace otabc;

TEST_CASE("identical measures transport for free") {
    const auto u01 = gen::from_cloud({{0.0}, {1.0}}, 1);
    const auto res = kantorovich_discrete(u01, u01, CostFunction::metric_power(1.0));
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.coupling(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.coupling(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.coupling.max_marginal_violation() <= 1e-9);
}

TEST_CASE("a point mass forces the coupling") {
    const auto delta0 = gen::from_cloud({{0.0}}, 1);
    const auto mix = EmpiricalMeasure::from_weighted(std::vector<double>{0.0, 2.0},
                                                     std::vector<double>{0.5, 0.5}, 1);
    const auto res = kantorovich_discrete(delta0, mix, CostFunction::metric_power(1.0));
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shifted two-atom measures cost their offset") {
    // Brute force over the two permutation couplings gives 1.
    const auto mu = gen::from_cloud({{0.0}, {2.0}}, 1);
    const auto nu = gen::from_cloud({{1.0}, {3.0}}, 1);
    const auto res = kantorovich_discrete(mu, nu, CostFunction::metric_power(1.0));
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wasserstein_1d(mu, nu, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("support cap is enforced") {
    RngStream rng(11, 0);
    const auto mu = gen::measure_1d(rng, 1);
    const auto nu = gen::measure_1d(rng, 1);
    CHECK_THROWS_AS(kantorovich_discrete(mu, nu, CostFunction::metric_power(1.0), 0), TooLargeError);
}

TEST_CASE("custom cost tables are validated") {
    CHECK_THROWS_AS(CostFunction::custom_table(2, 2, {1.0, 2.0, 3.0}), InvalidInputError);
    CHECK_THROWS_AS(CostFunction::custom_table(1, 2, {1.0, -2.0}), InvalidInputError);

    const auto mu = gen::from_cloud({{0.0}, {1.0}}, 1);
    const auto nu = gen::from_cloud({{0.0}, {1.0}}, 1);
    const auto wrong = CostFunction::custom_table(3, 2, std::vector<double>(6, 1.0));
    CHECK_THROWS_AS(kantorovich_discrete(mu, nu, wrong), InvalidInputError);

    // Zero diagonal makes staying put optimal.
    const auto table = CostFunction::custom_table(2, 2, {0.0, 5.0, 5.0, 0.0});
    const auto res = kantorovich_discrete(mu, nu, table);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("1-d closed form: point masses and identity") {
    const auto d0 = gen::from_cloud({{0.0}}, 1);
    for (const double c : {0.5, 2.0, 7.25}) {
        const auto dc = gen::from_cloud({{c}}, 1);
        for (const double p : {1.0, 2.0, 3.5}) {
            CHECK(wasserstein_1d(d0, dc, p) == doctest::Approx(c).epsilon(1e-12));
        }
    }
    RngStream rng(5, 5);
    const auto m = gen::weighted_measure_1d(rng, 17);
    CHECK(wasserstein_1d(m, m, 1.0) == 0.0);
    CHECK(wasserstein_1d(m, m, 2.0) == 0.0);

    SampleSpaceConfig s2;
    s2.dim = 2;
    const auto two_d = EmpiricalMeasure::from_samples(std::vector<double>{0.0, 0.0}, s2);
    CHECK_THROWS_AS(wasserstein_1d(two_d, two_d, 1.0), UnsupportedError);
    CHECK_THROWS_AS(wasserstein_1d(d0, d0, 0.5), InvalidInputError);
}

TEST_CASE("1-d closed form agrees with the exact solver") {
    RngStream rng(314159, 0);
    for (int trial = 0; trial < 120; ++trial) {
        const auto mu = gen::weighted_measure_1d(rng, 24);
        const auto nu = gen::weighted_measure_1d(rng, 24);
        for (const double p : {1.0, 2.0}) {
            const double w = wasserstein_1d(mu, nu, p);
            const auto k = kantorovich_discrete(mu, nu, CostFunction::metric_power(p));
            CHECK(std::abs(std::pow(w, p) - k.value) <= 1e-9);
            CHECK(k.coupling.max_marginal_violation() <= 1e-9);
        }
    }
}

TEST_CASE("wasserstein_p dispatches by dimension") {
    RngStream rng(2718, 0);
    const auto mu = gen::measure_1d(rng, 9);
    const auto nu = gen::measure_1d(rng, 9);
    CHECK(wasserstein_p(mu, nu, 2.0) == wasserstein_1d(mu, nu, 2.0));

    const auto a = gen::from_cloud({{0.0, 0.0}}, 2);
    const auto b = gen::from_cloud({{3.0, 4.0}}, 2);
    CHECK(wasserstein_p(a, b, 2.0) == doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(wasserstein_p(mu, a, 1.0), InvalidInputError);
    CHECK_THROWS_AS(wasserstein_p(a, b, 2.0, MetricKind::euclidean, 0), TooLargeError);
}

TEST_CASE("exact solver matches the permutation oracle in two dimensions") {
    RngStream rng(424242, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        const auto xs = gen::point_cloud(rng, 2, n);
        const auto ys = gen::point_cloud(rng, 2, n);
        const auto mu = gen::from_cloud(xs, 2);
        const auto nu = gen::from_cloud(ys, 2);
        if (mu.size() != n || nu.size() != n) continue; // atom collision; not at random doubles
        for (const double p : {1.0, 2.0}) {
            const double expected = oracle::min_permutation_cost(xs, ys, p, true);
            const auto res = kantorovich_discrete(mu, nu, CostFunction::metric_power(p));
            CHECK(std::abs(res.value - expected) <= 1e-9);
        }
    }
}

TEST_CASE("metric axioms hold on random instances") {
    RngStream rng(777, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = gen::measure_1d(rng, 8);
        const auto b = gen::measure_1d(rng, 8);
        const auto c = gen::measure_1d(rng, 8);

        for (const double p : {1.0, 2.0}) {
            const double ab = wasserstein_p(a, b, p);
            const double ba = wasserstein_p(b, a, p);
            const double ac = wasserstein_p(a, c, p);
            const double bc = wasserstein_p(b, c, p);
            CHECK(ab >= 0.0);
            CHECK(std::abs(ab - ba) <= 1e-9);
            CHECK(ac <= ab + bc + 1e-9);
            CHECK(wasserstein_p(a, a, p) <= 1e-12);
        }
        if (!(a == b)) {
            CHECK(wasserstein_p(a, b, 1.0) > 1e-12);
            CHECK(radon_distance(a, b) > 1e-12);
        }

        const double rab = radon_distance(a, b);
        CHECK(std::abs(rab - radon_distance(b, a)) <= 1e-12);
        CHECK(rab >= 0.0);
        CHECK(rab <= 2.0);
        CHECK(radon_distance(a, c) <= rab + radon_distance(b, c) + 1e-12);
        CHECK(radon_distance(a, a) == 0.0);
    }
}

TEST_CASE("radon distance on atoms") {
    const auto d0 = gen::from_cloud({{0.0}}, 1);
    const auto d1 = gen::from_cloud({{1.0}}, 1);
    CHECK(radon_distance(d0, d0) == 0.0);
    CHECK(radon_distance(d0, d1) == 2.0);

    const auto u01 = gen::from_cloud({{0.0}, {1.0}}, 1);
    const auto u12 = gen::from_cloud({{1.0}, {2.0}}, 1);
    CHECK(radon_distance(u01, u12) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("radon distance equals the sign brute force") {
    RngStream rng(31337, 1);
    for (int trial = 0; trial < 60; ++trial) {
        const auto a = gen::measure_1d(rng, 6, -2.0, 2.0);
        const auto b = gen::weighted_measure_1d(rng, 6, -2.0, 2.0);
        CHECK(std::abs(radon_distance(a, b) - oracle::radon_sign_bruteforce(a, b)) <= 1e-12);
    }
    // Multivariate atoms as well.
    RngStream rng2(31338, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = gen::measure_nd(rng2, 2, 5);
        const auto b = gen::measure_nd(rng2, 2, 5);
        CHECK(std::abs(radon_distance(a, b) - oracle::radon_sign_bruteforce(a, b)) <= 1e-12);
    }
}

TEST_CASE("sliced distance: identity, 1-d reduction, determinism") {
    RngStream rng(909, 4);
    const auto a2 = gen::measure_nd(rng, 2, 7);
    for (const std::uint64_t seed : {1ull, 99ull, 123456ull}) {
        CHECK(sliced_wasserstein(a2, a2, 2.0, 25, seed) == 0.0);
    }

    const auto m1 = gen::measure_1d(rng, 11);
    const auto n1 = gen::measure_1d(rng, 11);
    CHECK(sliced_wasserstein(m1, n1, 1.0, 1, 42) == wasserstein_1d(m1, n1, 1.0));
    CHECK(sliced_wasserstein(m1, n1, 2.0, 64, 43) == wasserstein_1d(m1, n1, 2.0));

    const auto b2 = gen::measure_nd(rng, 2, 7);
    const double v1 = sliced_wasserstein(a2, b2, 2.0, 50, 7);
    const double v2 = sliced_wasserstein(a2, b2, 2.0, 50, 7);
    CHECK(v1 == v2);

    CHECK_THROWS_AS(sliced_wasserstein(a2, b2, 2.0, 0, 7), InvalidInputError);
}

TEST_CASE("sliced distance between offset point masses") {
    // E |<u, (1,1)>|^2 over uniform directions = |(1,1)|^2 / 2 = 1, so the
    // sliced distance at p = 2 concentrates near 1.
    const auto a = gen::from_cloud({{0.0, 0.0}}, 2);
    const auto b = gen::from_cloud({{1.0, 1.0}}, 2);
    for (const std::uint64_t seed : {101ull, 202ull, 303ull}) {
        const double v = sliced_wasserstein(a, b, 2.0, 100'000, seed);
        CHECK(std::abs(v - 1.0) <= 0.02);
    }
}

TEST_CASE("discrepancy wrapper dispatches and validates") {
    RngStream rng(5150, 6);
    const auto a = gen::measure_1d(rng, 10);
    const auto b = gen::measure_1d(rng, 10);

    Discrepancy w;
    w.kind = Discrepancy::Kind::wasserstein;
    w.p = 2.0;
    CHECK(w.evaluate(a, b) == wasserstein_p(a, b, 2.0));

    Discrepancy r;
    r.kind = Discrepancy::Kind::radon;
    CHECK(r.evaluate(a, b) == radon_distance(a, b));

    Discrepancy s;
    s.kind = Discrepancy::Kind::sliced_wasserstein;
    s.n_projections = 8;
    s.projection_seed = 99;
    CHECK(s.evaluate(a, b) == sliced_wasserstein(a, b, s.p, 8, 99));

    Discrepancy bad;
    bad.p = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
    bad.p = 1.0;
    bad.n_projections = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}
