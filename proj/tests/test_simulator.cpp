#include <doctest.h>

#include <cmath>

#include "cac/error.hpp"
#include "cac/simulator.hpp"
#include "oracles.hpp"

using namespace cac;

namespace {

// mu_a + eta = 1 so the holding rate is 1 and p_h = 0.25.
const TrafficParams kUnitHolding{1.0, 0.75, 0.25, std::nullopt};

SimConfig open_loop(AdmissionPolicy policy, double lambda_n, double lambda_h, std::uint64_t seed,
                    std::uint64_t target) {
    TrafficParams t = kUnitHolding;
    t.lambda_n = lambda_n;
    SimConfig cfg{policy, t};
    cfg.mode = OpenLoop{lambda_h};
    cfg.seed = seed;
    cfg.target_arrivals = target;
    return cfg;
}

bool same(const SimReport& a, const SimReport& b) {
    return a.new_offered == b.new_offered && a.new_blocked == b.new_blocked &&
           a.handoff_offered == b.handoff_offered && a.handoff_dropped == b.handoff_dropped &&
           a.measured_time == b.measured_time && a.se_block == b.se_block;
}

}  // namespace

TEST_CASE("small guard-band chain matches its analytical values") {
    const auto r = simulate(open_loop(AdmissionPolicy::acceptance_guard(2, 1, 2, 0.5), 1.0, 1.0, 42, 400'000));
    CHECK(r.new_offered == 400'000);
    const double se_b = std::sqrt((5.0 / 9.0) * (4.0 / 9.0) / static_cast<double>(r.new_offered));
    CHECK(std::abs(r.p_block_hat - 5.0 / 9.0) <= 3.0 * std::max(se_b, r.se_block));
    CHECK(std::abs(r.p_drop_hat - 1.0 / 3.0) <= 3.0 * r.se_drop);
    CHECK(r.p_block_hat == static_cast<double>(r.new_blocked) / static_cast<double>(r.new_offered));
    CHECK(r.p_drop_hat == static_cast<double>(r.handoff_dropped) / static_cast<double>(r.handoff_offered));
    CHECK(r.new_blocked <= r.new_offered);
    CHECK(r.handoff_dropped <= r.handoff_offered);
    CHECK(r.ci95_block > 0.0);
    CHECK(r.max_occupancy <= 2);
}

TEST_CASE("pure handoff traffic is an Erlang loss system") {
    auto cfg = open_loop(AdmissionPolicy::non_priority(5), 0.0, 4.0, 3, 300'000);
    CHECK_THROWS_AS(simulate(cfg), DegenerateRun);
    cfg.basis = TargetBasis::HandoffArrivals;
    const auto r = simulate(cfg);
    CHECK(r.new_offered == 0);
    CHECK(std::isnan(r.p_block_hat));
    CHECK(r.handoff_offered == 300'000);
    CHECK(std::abs(r.p_drop_hat - oracle::erlang_b(5, 4.0)) <= 3.0 * r.se_drop);
}

TEST_CASE("degenerate and invalid configurations") {
    auto cfg = open_loop(AdmissionPolicy::non_priority(5), 1.0, 0.0, 1, 1000);
    cfg.basis = TargetBasis::HandoffArrivals;
    CHECK_THROWS_AS(simulate(cfg), DegenerateRun);

    SimConfig closed{AdmissionPolicy::new_call_bounding(5, 0), kUnitHolding};
    closed.basis = TargetBasis::HandoffArrivals;
    CHECK_THROWS_AS(simulate(closed), DegenerateRun);

    auto zero = open_loop(AdmissionPolicy::non_priority(5), 1.0, 0.0, 1, 0);
    CHECK_THROWS_AS(simulate(zero), DomainError);
    auto neg = open_loop(AdmissionPolicy::non_priority(5), 1.0, -1.0, 1, 10);
    CHECK_THROWS_AS(simulate(neg), DomainError);
    auto carry = open_loop(AdmissionPolicy::non_priority(5), 1.0, 1.0, 1, 10);
    carry.params.mu_override = 2.0;
    carry.holding = HoldingModel::CarryRemaining;
    CHECK_THROWS_AS(simulate(carry), DomainError);
}

TEST_CASE("determinism and seed sensitivity") {
    const auto cfg = open_loop(AdmissionPolicy::new_call_bounding(8, 6), 5.0, 1.5, 77, 50'000);
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(same(a, b));
    auto other = cfg;
    other.seed = 78;
    CHECK_FALSE(same(a, simulate(other)));
}

TEST_CASE("occupancy stays within the channel count") {
    for (const auto& p : {AdmissionPolicy::non_priority(4), AdmissionPolicy::new_call_bounding(4, 2),
                          AdmissionPolicy::acceptance_guard(4, 1, 3, 0.4)}) {
        const auto r = simulate(open_loop(p, 20.0, 20.0, 5, 20'000));
        CHECK(r.max_occupancy == 4);
        CHECK(r.handoff_dropped > 0);
    }
}

TEST_CASE("warm-up arrivals are excluded") {
    auto cfg = open_loop(AdmissionPolicy::non_priority(4), 2.0, 0.0, 9, 1000);
    cfg.warmup_arrivals = 5000;
    CHECK(simulate(cfg).new_offered == 1000);
    CHECK(default_warmup(1000) == 10'000);
    CHECK(default_warmup(1'000'000) == 100'000);
}

TEST_CASE("closed-loop wraparound reproduces its own flow balance") {
    // Paper rates, light enough that blocking is rare but not absent.
    TrafficParams t{1.05, 1.0 / 120.0, 1.0 / 360.0, std::nullopt};
    SimConfig cfg{AdmissionPolicy::acceptance_guard(130, 100, 110, 0.5), t};
    cfg.seed = 12;
    cfg.target_arrivals = 300'000;
    const auto r = simulate(cfg);
    const double p_h = 0.25;
    const double drop = std::isnan(r.p_drop_hat) ? 0.0 : r.p_drop_hat;
    const double predicted = t.lambda_n * p_h * (1.0 - r.p_block_hat) / (1.0 - p_h * (1.0 - drop));
    CHECK(r.handoff_dropped == 0);  // a released channel is always free for its own re-entry
    CHECK(r.p_block_hat > 0.0);
    CHECK(std::abs(r.measured_lambda_h - predicted) <= 3.0 * r.se_lambda_h);
}

TEST_CASE("fresh holding draws and carried residual call times are indistinguishable") {
    for (bool closed : {false, true}) {
        TrafficParams t{1.0, 1.0 / 120.0, 1.0 / 360.0, std::nullopt};
        SimConfig fresh{AdmissionPolicy::acceptance_guard(130, 100, 110, 0.5), t};
        fresh.target_arrivals = 300'000;
        fresh.seed = 100;
        if (!closed) fresh.mode = OpenLoop{0.3};
        SimConfig carry = fresh;
        carry.holding = HoldingModel::CarryRemaining;
        carry.seed = 200;
        const auto a = simulate(fresh);
        const auto b = simulate(carry);
        const double z_block =
            (a.p_block_hat - b.p_block_hat) / std::hypot(a.se_block, b.se_block);
        const double z_rate =
            (a.measured_lambda_h - b.measured_lambda_h) / std::hypot(a.se_lambda_h, b.se_lambda_h);
        CHECK(std::abs(z_block) < 4.0);
        CHECK(std::abs(z_rate) < 4.0);
    }
}

TEST_CASE("batch_simulate") {
    const auto base = open_loop(AdmissionPolicy::new_call_bounding(6, 4), 3.0, 1.0, 1, 20'000);
    auto seeded = base;
    seeded.seed = 2;
    auto broken = base;
    broken.params.lambda_n = 0.0;
    const auto out = batch_simulate({base, seeded, base, broken});
    REQUIRE(out.size() == 4);
    REQUIRE(out[0].report);
    REQUIRE(out[1].report);
    REQUIRE(out[2].report);
    CHECK(same(*out[0].report, *out[2].report));
    CHECK(same(*out[0].report, simulate(base)));
    CHECK_FALSE(same(*out[0].report, *out[1].report));
    CHECK_FALSE(out[3].report);
    CHECK_FALSE(out[3].error.empty());
    CHECK_THROWS_AS(batch_simulate({}), DomainError);
}
