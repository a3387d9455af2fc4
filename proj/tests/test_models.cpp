#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "otabc/models.hpp"

using namespace otabc;

TEST_CASE("simulation is a pure function of (theta, n, stream)") {
    const NormalLocationModel model;
    const double theta = 0.0;
    RngStream a(123, 5);
    RngStream b(123, 5);
    const auto za = model.simulate({&theta, 1}, 4, a);
    const auto zb = model.simulate({&theta, 1}, 4, b);
    CHECK(za.values == zb.values);
    REQUIRE(za.count() == 4);
    for (const double v : za.values) CHECK(std::isfinite(v));

    RngStream c(123, 6);
    const auto zc = model.simulate({&theta, 1}, 4, c);
    CHECK(za.values != zc.values);
}

TEST_CASE("normal location samples track huge locations") {
    const NormalLocationModel model;
    const double theta = 1e6;
    RngStream rng(88, 0);
    const auto z = model.simulate({&theta, 1}, 100, rng);
    for (const double v : z.values) {
        CHECK(std::abs(v - theta) <= 10.0);
    }
    CHECK(std::abs(oracle::mean(z.values) - theta) <= 0.5);
}

TEST_CASE("sample means concentrate across 1000 seeded runs") {
    const NormalLocationModel model;
    const double theta = 2.0;
    int ok = 0;
    for (std::uint64_t run = 0; run < 1000; ++run) {
        RngStream rng(5150, run);
        const auto z = model.simulate({&theta, 1}, 100, rng);
        if (std::abs(oracle::mean(z.values) - theta) <= 0.5) ++ok;
    }
    CHECK(ok >= 999);
}

TEST_CASE("log density of the normal location model") {
    const NormalLocationModel model;
    const double theta = 0.0;
    DataSet z;
    z.values = {0.0};
    constexpr double half_log_two_pi = 0.91893853320467274178;
    CHECK(model.log_density({&theta, 1}, z) == doctest::Approx(-half_log_two_pi).epsilon(1e-15));

    // The mode over theta sits at the sample.
    DataSet single;
    single.values = {1.3};
    const double at_mode = 1.3;
    const double off_a = 1.2, off_b = 1.4;
    CHECK(model.log_density({&at_mode, 1}, single) > model.log_density({&off_a, 1}, single));
    CHECK(model.log_density({&at_mode, 1}, single) > model.log_density({&off_b, 1}, single));

    const NormalLocationModel wide(2.0);
    DataSet pair;
    pair.values = {1.0, -1.0};
    const double got = wide.log_density({&theta, 1}, pair);
    const double expected = 2.0 * (-0.5 * std::log(2.0 * 3.14159265358979323846 * 4.0)) -
                            (1.0 + 1.0) / (2.0 * 4.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    CHECK(wide.iid_normal_sigma() == 2.0);
}

TEST_CASE("log density varies continuously in the data") {
    const NormalLocationModel model;
    const double theta = 0.2;
    DataSet z;
    z.values = {-0.4, 0.1, 1.1};
    const double base = model.log_density({&theta, 1}, z);
    CHECK(std::isfinite(base));
    for (const double h : {1e-6, 1e-7}) {
        DataSet nudged = z;
        nudged.values[1] += h;
        CHECK(std::abs(model.log_density({&theta, 1}, nudged) - base) <= 10.0 * h);
    }
}

TEST_CASE("the mechanistic model hides its likelihood") {
    const PrefAttachModel model;
    const double theta = 1.0;
    DataSet z;
    z.values = {1.0, 1.0};
    CHECK(!model.has_log_density());
    CHECK_THROWS_AS(model.log_density({&theta, 1}, z), UnsupportedError);
    CHECK(!model.iid_normal_sigma().has_value());
}

TEST_CASE("theta outside the parameter space is rejected") {
    const PrefAttachModel model; // theta in [0, 3]
    const double theta = 4.0;
    RngStream rng(1, 1);
    CHECK_THROWS_AS(model.simulate({&theta, 1}, 10, rng), InvalidInputError);
    const double neg = -0.5;
    CHECK_THROWS_AS(model.simulate({&neg, 1}, 10, rng), InvalidInputError);
}

TEST_CASE("preferential attachment: seed edge and handshake identity") {
    RngStream rng(7, 7);
    const auto two = simulate_pref_attach(1.5, 2, rng);
    CHECK(two.values == std::vector<double>{1.0, 1.0});

    for (const std::size_t n : {2ull, 3ull, 10ull, 257ull}) {
        for (const double theta : {0.0, 0.7, 2.5}) {
            RngStream r(1234, n);
            const auto z = simulate_pref_attach(theta, n, r);
            REQUIRE(z.count() == n);
            const double total = std::accumulate(z.values.begin(), z.values.end(), 0.0);
            CHECK(total == 2.0 * static_cast<double>(n - 1));
            for (const double deg : z.values) CHECK(deg >= 1.0);
        }
    }
    RngStream r(0, 0);
    CHECK_THROWS_AS(simulate_pref_attach(1.0, 1, r), InvalidInputError);
}

TEST_CASE("stronger attachment concentrates degree mass at the top") {
    const std::size_t n = 1200;
    const std::size_t top = n / 100;
    int wins = 0;
    const int runs = 20;
    for (int i = 0; i < runs; ++i) {
        RngStream ra(999, static_cast<std::uint64_t>(i));
        RngStream rb(999, static_cast<std::uint64_t>(i));
        auto flat = simulate_pref_attach(0.0, n, ra).values;
        auto heavy = simulate_pref_attach(2.5, n, rb).values;
        std::sort(flat.rbegin(), flat.rend());
        std::sort(heavy.rbegin(), heavy.rend());
        const double mflat = std::accumulate(flat.begin(), flat.begin() + top, 0.0);
        const double mheavy = std::accumulate(heavy.begin(), heavy.begin() + top, 0.0);
        if (mheavy > mflat) ++wins;
    }
    CHECK(wins >= runs * 9 / 10);
}

TEST_CASE("repeated-normal model emits a single shared draw") {
    const RepeatedNormalModel model;
    const double theta = 0.5;
    RngStream rng(10, 3);
    const auto z = model.simulate({&theta, 1}, 50, rng);
    REQUIRE(z.count() == 50);
    for (const double v : z.values) CHECK(v == z.values.front());
}

TEST_CASE("conjugate posterior closed form") {
    // n = 4 observations with zero mean: precision 1 + 4 = 5.
    const std::vector<double> centered{-1.0, -0.5, 0.5, 1.0};
    const auto post = normal_true_posterior(0.0, 1.0, centered);
    CHECK(post.mean == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(post.sd == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
    CHECK(post.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    const std::vector<double> shifted{0.5, 1.0, 1.0, 1.5}; // mean 1
    const auto post2 = normal_true_posterior(0.0, 1.0, shifted);
    CHECK(post2.mean == doctest::Approx(0.8).epsilon(1e-12));

    const auto vacuous = normal_true_posterior(0.3, 2.0, {});
    CHECK(vacuous.mean == 0.3);
    CHECK(vacuous.sd == 2.0);

    CHECK(post.cdf(post.mean) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = -1.0;
    for (double x = -3.0; x <= 3.0; x += 0.1) {
        const double f = post.cdf(x);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK_THROWS_AS(normal_true_posterior(0.0, 0.0, centered), InvalidInputError);
}

TEST_CASE("priors sample inside their support and integrate to one") {
    const Box hull{Interval{-2.0, 3.0}};
    const auto uni = Prior::uniform(hull);
    const auto gauss = Prior::gaussian({0.5}, {1.5});
    const auto trunc = Prior::truncated_gaussian({0.0}, {1.0}, hull);

    RngStream rng(2024, 0);
    for (int i = 0; i < 500; ++i) {
        const auto u = uni.sample(rng);
        CHECK(u[0] >= -2.0);
        CHECK(u[0] <= 3.0);
        const auto t = trunc.sample(rng);
        CHECK(t[0] >= -2.0);
        CHECK(t[0] <= 3.0);
        CHECK(std::isfinite(gauss.sample(rng)[0]));
    }

    const Box everything{Interval{}};
    CHECK(std::abs(uni.interval_prob(hull) - 1.0) <= 1e-9);
    CHECK(std::abs(gauss.interval_prob(everything) - 1.0) <= 1e-9);
    CHECK(std::abs(trunc.interval_prob(hull) - 1.0) <= 1e-9);

    CHECK(uni.cdf1(-2.0) == 0.0);
    CHECK(uni.cdf1(3.0) == 1.0);
    CHECK(uni.cdf1(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gauss.cdf1(0.5) == doctest::Approx(0.5).epsilon(1e-15));

    const Box wrong_dim{Interval{0.0, 1.0}, Interval{0.0, 1.0}};
    CHECK_THROWS_AS(uni.interval_prob(wrong_dim), InvalidInputError);
    CHECK_THROWS_AS(Prior::uniform(Box{Interval{0.0, 0.0}}), InvalidInputError);
    CHECK_THROWS_AS(Prior::gaussian({0.0}, {0.0}), InvalidInputError);
    CHECK_THROWS_AS(Prior::truncated_gaussian({0.0}, {1.0}, Box{Interval{50.0, 60.0}}),
                    InvalidInputError);
}

TEST_CASE("gaussian prior samples match their distribution") {
    const auto gauss = Prior::gaussian({1.0}, {2.0});
    std::vector<double> xs;
    RngStream rng(31415, 0);
    for (int i = 0; i < 20000; ++i) xs.push_back(gauss.sample(rng)[0]);
    const double ks = oracle::ks_distance(xs, [](double x) {
        return oracle::std_normal_cdf((x - 1.0) / 2.0);
    });
    CHECK(ks <= 0.02);
}
