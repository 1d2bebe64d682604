#include <doctest.h>

#include <cmath>
#include <random>

#include "cac/birth_death.hpp"
#include "cac/error.hpp"
#include "oracles.hpp"

using namespace cac;

namespace {

void check_probs(const StationaryDistribution& d, std::vector<double> expected, double tol) {
    REQUIRE(d.probs.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(d.probs[i] - expected[i]) <= tol);
    }
}

double total(const StationaryDistribution& d) {
    double s = 0.0;
    for (double p : d.probs) s += p;
    return s;
}

BirthRateProfile random_profile(std::mt19937_64& gen, int max_channels, double max_rate) {
    std::uniform_int_distribution<int> channels(1, max_channels);
    std::uniform_real_distribution<double> rate(0.0, max_rate);
    std::bernoulli_distribution zero(0.05);
    std::vector<double> b(static_cast<std::size_t>(channels(gen)));
    for (auto& v : b) v = zero(gen) ? 0.0 : rate(gen);
    return BirthRateProfile(std::move(b));
}

}  // namespace

TEST_CASE("recurrence solver examples") {
    check_probs(stationary_distribution(BirthRateProfile({1.0, 1.0}), 1.0), {0.4, 0.4, 0.2}, 1e-15);
    check_probs(stationary_distribution(BirthRateProfile({0.0, 0.0, 0.0}), 1.0), {1, 0, 0, 0}, 0.0);
    check_probs(stationary_distribution(BirthRateProfile({2.0, 1.5}), 1.0),
                {2.0 / 9.0, 4.0 / 9.0, 1.0 / 3.0}, 1e-15);
}

TEST_CASE("dense oracle examples") {
    check_probs(stationary_distribution_dense_oracle(BirthRateProfile({1.0, 1.0}), 1.0),
                {0.4, 0.4, 0.2}, 1e-12);
    check_probs(stationary_distribution_dense_oracle(BirthRateProfile({0.0, 0.0, 0.0}), 1.0),
                {1, 0, 0, 0}, 1e-12);
    check_probs(stationary_distribution_dense_oracle(BirthRateProfile({2.0, 1.5}), 1.0),
                {2.0 / 9.0, 4.0 / 9.0, 1.0 / 3.0}, 1e-12);
    check_probs(stationary_distribution_dense_oracle(BirthRateProfile({3.0}), 1.0), {0.25, 0.75},
                1e-12);
    check_probs(stationary_distribution_dense_oracle(BirthRateProfile({2.0, 0.0}), 1.0),
                {1.0 / 3.0, 2.0 / 3.0, 0.0}, 1e-12);
}

TEST_CASE("dense oracle refuses large chains") {
    CHECK_THROWS_AS(stationary_distribution_dense_oracle(
                        BirthRateProfile(std::vector<double>(kDenseOracleMaxChannels + 1, 1.0)), 1.0),
                    UnsupportedSize);
    CHECK_NOTHROW(stationary_distribution_dense_oracle(
        BirthRateProfile(std::vector<double>(kDenseOracleMaxChannels, 1.0)), 1.0));
}

TEST_CASE("parameter-domain errors") {
    CHECK_THROWS_AS(BirthRateProfile({}), DomainError);
    CHECK_THROWS_AS(BirthRateProfile({1.0, -0.5}), DomainError);
    CHECK_THROWS_AS(BirthRateProfile({std::nan("")}), DomainError);
    CHECK_THROWS_AS(stationary_distribution(BirthRateProfile({1.0}), 0.0), DomainError);
    CHECK_THROWS_AS(stationary_distribution(BirthRateProfile({1.0}), -1.0), DomainError);
    CHECK_THROWS_AS(stationary_distribution_dense_oracle(BirthRateProfile({1.0}), 0.0), DomainError);
    CHECK_THROWS_AS(BirthRateProfile({1.0}).rate_at(1), IndexError);
}

TEST_CASE("tail_mass") {
    const auto d = stationary_distribution(BirthRateProfile({2.0, 1.5}), 1.0);
    CHECK(tail_mass(d, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(tail_mass(d, 0) == 1.0);
    const auto e = stationary_distribution(BirthRateProfile({1.0, 1.0}), 1.0);
    CHECK(tail_mass(e, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK_THROWS_AS(tail_mass(d, 3), IndexError);
    CHECK_THROWS_AS(tail_mass(d, -1), IndexError);
}

TEST_CASE("zero birth rate truncates support with exact zeros") {
    const auto d = stationary_distribution(BirthRateProfile({5.0, 4.0, 0.0, 7.0, 7.0}), 1.0);
    CHECK(d.probs[2] > 0.0);
    CHECK(d.probs[3] == 0.0);
    CHECK(d.probs[4] == 0.0);
    CHECK(d.probs[5] == 0.0);
}

TEST_CASE("recurrence agrees with dense oracle on random profiles") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto profile = random_profile(gen, 20, 30.0);
        const double mu = std::uniform_real_distribution<double>(0.2, 5.0)(gen);
        const auto fast = stationary_distribution(profile, mu);
        const auto dense = stationary_distribution_dense_oracle(profile, mu);
        for (std::size_t i = 0; i < fast.probs.size(); ++i) {
            CHECK(std::abs(fast.probs[i] - dense.probs[i]) <= 1e-10);
        }
        CHECK(std::abs(total(fast) - 1.0) <= 1e-12);
    }
}

TEST_CASE("recurrence agrees with long double closed-form products") {
    // Three-band profile at C = 40 against the factorial product form.
    const int c = 40, m = 25, n = 32;
    const double alpha = 0.35, lambda_n = 14.0, lambda_h = 6.0, mu = 0.8;
    std::vector<double> b(c);
    for (int i = 0; i < c; ++i) b[i] = lambda_n * (i < m ? 1.0 : (i < n ? alpha : 0.0)) + lambda_h;
    const auto fast = stationary_distribution(BirthRateProfile(b), mu);
    const auto closed = oracle::band_distribution(c, m, n, alpha, lambda_n, lambda_h, mu);
    for (int i = 0; i <= c; ++i) {
        CHECK(std::abs(fast.probs[i] - static_cast<double>(closed[i])) <= 1e-13);
    }
    CHECK(fast.log_norm == doctest::Approx(-std::log(static_cast<double>(closed[0]))).epsilon(1e-12));
}

TEST_CASE("large chains neither overflow nor underflow") {
    for (double scale : {1.0, 10.0, 100.0, 1e3, 1e4}) {
        const auto d = stationary_distribution(BirthRateProfile(std::vector<double>(130, scale)), 1.0);
        CHECK(std::abs(total(d) - 1.0) <= 1e-12);
        for (double p : d.probs) {
            CHECK(std::isfinite(p));
            CHECK(p >= 0.0);
        }
        CHECK(std::isfinite(d.log_norm));
        if (scale >= 1e3) CHECK(d.probs[130] > 0.8);
    }
    // Erlang-B at 130 channels through the solver vs the recursion oracle.
    const auto d = stationary_distribution(BirthRateProfile(std::vector<double>(130, 150.0)), 1.0);
    CHECK(d.probs[130] == doctest::Approx(oracle::erlang_b(130, 150.0)).epsilon(1e-12));
}

TEST_CASE("scale invariance") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto profile = random_profile(gen, 60, 50.0);
        const double k = std::uniform_real_distribution<double>(0.01, 100.0)(gen);
        std::vector<double> scaled(profile.rates().begin(), profile.rates().end());
        for (auto& v : scaled) v *= k;
        const auto a = stationary_distribution(profile, 1.3);
        const auto b = stationary_distribution(BirthRateProfile(scaled), 1.3 * k);
        for (std::size_t i = 0; i < a.probs.size(); ++i) {
            CHECK(std::abs(a.probs[i] - b.probs[i]) <= 1e-12);
        }
    }
}

TEST_CASE("raising one birth rate does not lower any tail above it") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto profile = random_profile(gen, 15, 10.0);
        const int c = profile.channels();
        const int i = std::uniform_int_distribution<int>(0, c - 1)(gen);
        std::vector<double> raised(profile.rates().begin(), profile.rates().end());
        raised[i] += std::uniform_real_distribution<double>(0.01, 5.0)(gen);
        const auto lo = stationary_distribution(profile, 1.0);
        const auto hi = stationary_distribution(BirthRateProfile(raised), 1.0);
        for (int j = i + 1; j <= c; ++j) {
            CHECK(tail_mass(hi, j) >= tail_mass(lo, j) - 1e-15);
        }
    }
}
