#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cac/birth_death.hpp"
#include "cac/traffic.hpp"

namespace cac {

struct NonPriority {};

/// New calls use channels 0..m-1 only; the remaining C - m are guard channels.
struct NewCallBounding {
    int m = 0;
};

/// Full access below m, new calls admitted with probability alpha in [m, n),
/// handoff-only from n up.
struct AcceptanceGuard {
    int m = 0;
    int n = 0;
    double alpha = 0.0;
};

using PolicyKind = std::variant<NonPriority, NewCallBounding, AcceptanceGuard>;

class AdmissionPolicy {
public:
    /// Throws DomainError if the thresholds or alpha violate 0 <= m <= n <= c, alpha in [0,1].
    AdmissionPolicy(int channels, PolicyKind kind);

    static AdmissionPolicy non_priority(int channels) { return {channels, NonPriority{}}; }
    static AdmissionPolicy new_call_bounding(int channels, int m) {
        return {channels, NewCallBounding{m}};
    }
    static AdmissionPolicy acceptance_guard(int channels, int m, int n, double alpha) {
        return {channels, AcceptanceGuard{m, n, alpha}};
    }

    int channels() const noexcept { return channels_; }
    const PolicyKind& kind() const noexcept { return kind_; }

    /// Guard-band size C - m for NewCallBounding, C - n for AcceptanceGuard, 0 otherwise.
    int guard_channels() const noexcept;

    /// Short comma-free identifier, e.g. "ncb:m=100" or "ag:m=100:n=110:a=0.5".
    std::string label() const;

private:
    int channels_;
    PolicyKind kind_;
};

/// Probability that a new call arriving in state i is admitted. Zero at i = C.
double admission_probability(const AdmissionPolicy& policy, int state);

BirthRateProfile birth_profile(const AdmissionPolicy& policy, double lambda_n, double lambda_h);

struct PerformanceMetrics {
    double p_block = 0.0;
    double p_drop = 0.0;
    double lambda_h = 0.0;
    int fp_iterations = 0;
    double fp_residual = 0.0;
};

/// Metrics at an externally fixed handoff rate. Blocking is the PASTA sum
/// sum_i P(i) (1 - a(i)); dropping is P(C).
PerformanceMetrics evaluate(const AdmissionPolicy& policy, double lambda_n, double lambda_h,
                            double mu);

/// Same as evaluate() but also hands back the distribution it was computed from.
PerformanceMetrics evaluate(const AdmissionPolicy& policy, double lambda_n, double lambda_h,
                            double mu, StationaryDistribution& dist_out);

struct FixedPointOptions {
    double damping = 0.5;
    double relative_tolerance = 1e-10;  ///< scaled by max(lambda_n, 1)
    int max_iterations = 10'000;
};

/// Solves lambda_h = handoff_balance_rhs(P_B(lambda_h), P_D(lambda_h)) by damped
/// iteration from lambda_n * p_h. Throws ConvergenceError on iteration cap.
PerformanceMetrics evaluate_with_flow_balance(const AdmissionPolicy& policy,
                                              const TrafficParams& params,
                                              const FixedPointOptions& options = {});

struct AlphaPoint {
    double alpha = 0.0;
    PerformanceMetrics metrics;
};

struct AlphaSearchResult {
    double alpha_star = 0.0;
    PerformanceMetrics metrics;
    std::vector<AlphaPoint> grid;  ///< in input order
};

inline constexpr double kAlphaTieTolerance = 1e-15;

std::vector<double> default_alpha_grid();

/// Minimizes flow-balanced p_block over the grid. Values within a relative
/// kAlphaTieTolerance of the minimum tie, and ties go to the smallest alpha.
AlphaSearchResult optimal_alpha(int m, int n, int channels, const TrafficParams& params,
                                std::span<const double> alpha_grid,
                                const FixedPointOptions& options = {});

}  // namespace cac
