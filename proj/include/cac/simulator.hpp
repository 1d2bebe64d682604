#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cac/admission.hpp"
#include "cac/traffic.hpp"

namespace cac {

/// Handoff arrivals form an external Poisson stream.
struct OpenLoop {
    double lambda_h = 0.0;
};

/// Every handoff-out immediately re-enters the same cell as a handoff arrival,
/// standing in for a ring of identical neighbours.
struct ClosedLoopWraparound {};

using SimMode = std::variant<OpenLoop, ClosedLoopWraparound>;

enum class HoldingModel {
    /// One Exp(mu) holding draw per admission plus a Bernoulli(p_h) departure type.
    FreshDraw,
    /// A call keeps its residual call length across cells; each cell draws a fresh dwell.
    CarryRemaining,
};

enum class TargetBasis { NewArrivals, HandoffArrivals };

struct SimConfig {
    SimConfig(AdmissionPolicy policy_, TrafficParams params_)
        : policy(std::move(policy_)), params(params_) {}

    AdmissionPolicy policy;
    TrafficParams params;
    SimMode mode = ClosedLoopWraparound{};
    std::uint64_t seed = 1;
    std::uint64_t target_arrivals = 1'000'000;
    /// Defaults to default_warmup(target_arrivals).
    std::optional<std::uint64_t> warmup_arrivals;
    HoldingModel holding = HoldingModel::FreshDraw;
    TargetBasis basis = TargetBasis::NewArrivals;
    int batches = 32;  ///< for the batch-means standard errors
};

/// 10% of the target, at least 10'000.
std::uint64_t default_warmup(std::uint64_t target_arrivals);

struct SimReport {
    std::uint64_t new_offered = 0;
    std::uint64_t new_blocked = 0;
    std::uint64_t handoff_offered = 0;
    std::uint64_t handoff_dropped = 0;
    double p_block_hat = 0.0;  ///< NaN when no new call was offered
    double p_drop_hat = 0.0;   ///< NaN when no handoff was offered
    /// 95% half-widths from the binomial normal approximation.
    double ci95_block = 0.0;
    double ci95_drop = 0.0;
    /// Batch-means standard errors; these account for correlation between arrivals.
    double se_block = 0.0;
    double se_drop = 0.0;
    double measured_lambda_h = 0.0;
    double se_lambda_h = 0.0;
    double measured_time = 0.0;
    int max_occupancy = 0;
    std::uint64_t seed = 0;
};

/// Throws DomainError for invalid configs and DegenerateRun when the counted
/// arrival class can never occur.
SimReport simulate(const SimConfig& config);

struct BatchOutcome {
    std::optional<SimReport> report;
    std::string error;  ///< empty on success
};

/// Results in input order; a failing config records its error and the rest still run.
std::vector<BatchOutcome> batch_simulate(const std::vector<SimConfig>& configs);

}  // namespace cac
