#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "cac/error.hpp"
#include "cac/traffic.hpp"

using namespace cac;

TEST_CASE("derive_rates at the paper's mean times") {
    const auto r = derive_rates({1.0, 1.0 / 120.0, 1.0 / 360.0, std::nullopt});
    CHECK(r.p_h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.mu == doctest::Approx(1.0 / 90.0).epsilon(1e-15));
}

TEST_CASE("derive_rates symmetric and integer cases") {
    CHECK(derive_rates({0.0, 0.3, 0.3, std::nullopt}).p_h == 0.5);
    const auto r = derive_rates({0.0, 1.0, 3.0, std::nullopt});
    CHECK(r.p_h == 0.75);
    CHECK(r.mu == 4.0);
}

TEST_CASE("derive_rates honours a mu override but keeps p_h") {
    const auto r = derive_rates({1.0, 1.0, 3.0, 2.5});
    CHECK(r.mu == 2.5);
    CHECK(r.p_h == 0.75);
}

TEST_CASE("derive_rates rejects out-of-domain parameters") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(derive_rates({1.0, 0.0, 1.0, std::nullopt}), DomainError);
    CHECK_THROWS_AS(derive_rates({1.0, 1.0, -1.0, std::nullopt}), DomainError);
    CHECK_THROWS_AS(derive_rates({1.0, nan, 1.0, std::nullopt}), DomainError);
    CHECK_THROWS_AS(derive_rates({1.0, 1.0, inf, std::nullopt}), DomainError);
    CHECK_THROWS_AS(derive_rates({-0.1, 1.0, 1.0, std::nullopt}), DomainError);
    CHECK_THROWS_AS(derive_rates({1.0, 1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("handoff_balance_rhs examples") {
    const TrafficParams params{1.0, 1.0 / 120.0, 1.0 / 360.0, std::nullopt};
    const auto rates = derive_rates(params);
    CHECK(handoff_balance_rhs(params, rates, 0.0, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(handoff_balance_rhs(params, rates, 1.0, 0.3) == 0.0);
    CHECK(handoff_balance_rhs(params, rates, 0.1, 0.05) ==
          doctest::Approx(0.295081967213).epsilon(1e-11));
    CHECK_THROWS_AS(handoff_balance_rhs(params, rates, 1.5, 0.0), DomainError);
    CHECK_THROWS_AS(handoff_balance_rhs(params, rates, 0.0, -0.1), DomainError);
}

TEST_CASE("handoff_balance_rhs zero-loss limit is lambda_n p_h / (1 - p_h)") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> rate(0.01, 10.0);
    for (int k = 0; k < 200; ++k) {
        const TrafficParams params{rate(gen), rate(gen), rate(gen), std::nullopt};
        const auto rates = derive_rates(params);
        CHECK(handoff_balance_rhs(params, rates, 0.0, 0.0) ==
              doctest::Approx(params.lambda_n * rates.p_h / (1.0 - rates.p_h)).epsilon(1e-14));
    }
}

TEST_CASE("handoff_balance_rhs is nonincreasing in p_b and p_d") {
    const TrafficParams params{2.0, 0.4, 0.7, std::nullopt};
    const auto rates = derive_rates(params);
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            const double pb = i / 20.0, pd = j / 20.0;
            const double here = handoff_balance_rhs(params, rates, pb, pd);
            if (i < 20) CHECK(handoff_balance_rhs(params, rates, (i + 1) / 20.0, pd) <= here);
            if (j < 20) CHECK(handoff_balance_rhs(params, rates, pb, (j + 1) / 20.0) <= here);
        }
    }
}

TEST_CASE("derive_rates is bit-reproducible") {
    const TrafficParams params{0.7, 1.0 / 97.0, 1.0 / 311.0, std::nullopt};
    const auto a = derive_rates(params);
    const auto b = derive_rates(params);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}
