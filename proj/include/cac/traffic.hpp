#pragma once

#include <optional>

namespace cac {

/// Per-cell traffic description. All rates are per second.
struct TrafficParams {
    double lambda_n = 0.0;  ///< new-call arrival rate
    double mu_a = 0.0;      ///< inverse mean call duration
    double eta = 0.0;       ///< inverse mean cell dwell time
    /// Replaces the channel departure rate mu_a + eta when set.
    std::optional<double> mu_override;
};

struct DerivedRates {
    double mu = 0.0;   ///< channel release rate
    double p_h = 0.0;  ///< probability a carried call hands over before completing
};

/// Throws DomainError unless lambda_n >= 0, mu_a > 0, eta > 0, all finite.
void validate(const TrafficParams& params);

/// Channel holding is min(call length, dwell), so it is exponential with the
/// summed rate; the handover probability is the chance the dwell clock fires first.
DerivedRates derive_rates(const TrafficParams& params);

/// Handoff arrival rate implied by flow balance for a homogeneous network:
///   lambda_h = lambda_n * p_h * (1 - p_b) / (1 - p_h * (1 - p_d))
double handoff_balance_rhs(const TrafficParams& params, const DerivedRates& rates, double p_b,
                           double p_d);

}  // namespace cac
