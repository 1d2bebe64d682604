#include "cac/traffic.hpp"

#include <cmath>
#include <string>

#include "cac/error.hpp"

namespace cac {

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1]");
    }
}

}  // namespace

void validate(const TrafficParams& params) {
    if (!std::isfinite(params.lambda_n) || params.lambda_n < 0.0) {
        throw DomainError("lambda_n must be finite and >= 0");
    }
    if (!std::isfinite(params.mu_a) || params.mu_a <= 0.0) {
        throw DomainError("mu_a must be finite and > 0");
    }
    if (!std::isfinite(params.eta) || params.eta <= 0.0) {
        throw DomainError("eta must be finite and > 0");
    }
    if (params.mu_override && (!std::isfinite(*params.mu_override) || *params.mu_override <= 0.0)) {
        throw DomainError("mu override must be finite and > 0");
    }
}

DerivedRates derive_rates(const TrafficParams& params) {
    validate(params);
    DerivedRates rates;
    rates.mu = params.mu_override ? *params.mu_override : params.mu_a + params.eta;
    rates.p_h = params.eta / (params.eta + params.mu_a);
    return rates;
}

double handoff_balance_rhs(const TrafficParams& params, const DerivedRates& rates, double p_b,
                           double p_d) {
    require_probability(p_b, "p_b");
    require_probability(p_d, "p_d");
    if (!(rates.p_h >= 0.0 && rates.p_h < 1.0)) {
        throw DomainError("p_h must lie in [0, 1)");
    }
    return params.lambda_n * rates.p_h * (1.0 - p_b) / (1.0 - rates.p_h * (1.0 - p_d));
}

}  // namespace cac
