#include "cac/admission.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "cac/error.hpp"

namespace cac {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

AdmissionPolicy::AdmissionPolicy(int channels, PolicyKind kind)
    : channels_(channels), kind_(kind) {
    if (channels < 1) {
        throw DomainError("channel count must be >= 1");
    }
    std::visit(Overloaded{
                   [](const NonPriority&) {},
                   [channels](const NewCallBounding& p) {
                       if (p.m < 0 || p.m > channels) {
                           throw DomainError(fmt::format(
                               "new-call bounding threshold m={} outside 0..{}", p.m, channels));
                       }
                   },
                   [channels](const AcceptanceGuard& p) {
                       if (p.m < 0 || p.m > p.n || p.n > channels) {
                           throw DomainError(fmt::format(
                               "acceptance guard needs 0 <= m <= n <= {}, got m={} n={}",
                               channels, p.m, p.n));
                       }
                       if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
                           throw DomainError(
                               fmt::format("acceptance factor {} outside [0, 1]", p.alpha));
                       }
                   },
               },
               kind_);
}

int AdmissionPolicy::guard_channels() const noexcept {
    return std::visit(Overloaded{
                          [](const NonPriority&) { return 0; },
                          [this](const NewCallBounding& p) { return channels_ - p.m; },
                          [this](const AcceptanceGuard& p) { return channels_ - p.n; },
                      },
                      kind_);
}

std::string AdmissionPolicy::label() const {
    return std::visit(
        Overloaded{
            [](const NonPriority&) { return std::string("np"); },
            [](const NewCallBounding& p) { return fmt::format("ncb:m={}", p.m); },
            [](const AcceptanceGuard& p) {
                return fmt::format("ag:m={}:n={}:a={}", p.m, p.n, p.alpha);
            },
        },
        kind_);
}

double admission_probability(const AdmissionPolicy& policy, int state) {
    const int c = policy.channels();
    if (state < 0 || state > c) {
        throw IndexError(fmt::format("state {} outside 0..{}", state, c));
    }
    if (state == c) {
        return 0.0;
    }
    return std::visit(Overloaded{
                          [](const NonPriority&) { return 1.0; },
                          [state](const NewCallBounding& p) { return state < p.m ? 1.0 : 0.0; },
                          [state](const AcceptanceGuard& p) {
                              if (state < p.m) return 1.0;
                              if (state < p.n) return p.alpha;
                              return 0.0;
                          },
                      },
                      policy.kind());
}

BirthRateProfile birth_profile(const AdmissionPolicy& policy, double lambda_n, double lambda_h) {
    if (!(lambda_n >= 0.0) || !(lambda_h >= 0.0)) {
        throw DomainError("arrival rates must be >= 0");
    }
    const int c = policy.channels();
    std::vector<double> rates(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) {
        rates[static_cast<std::size_t>(i)] = lambda_n * admission_probability(policy, i) + lambda_h;
    }
    return BirthRateProfile(std::move(rates));
}

PerformanceMetrics evaluate(const AdmissionPolicy& policy, double lambda_n, double lambda_h,
                            double mu, StationaryDistribution& dist_out) {
    dist_out = stationary_distribution(birth_profile(policy, lambda_n, lambda_h), mu);
    const int c = policy.channels();
    PerformanceMetrics out;
    double blocked = 0.0;
    for (int i = 0; i <= c; ++i) {
        blocked += dist_out.probs[static_cast<std::size_t>(i)] *
                   (1.0 - admission_probability(policy, i));
    }
    out.p_block = std::min(blocked, 1.0);
    out.p_drop = dist_out.probs[static_cast<std::size_t>(c)];
    out.lambda_h = lambda_h;
    return out;
}

PerformanceMetrics evaluate(const AdmissionPolicy& policy, double lambda_n, double lambda_h,
                            double mu) {
    StationaryDistribution dist;
    return evaluate(policy, lambda_n, lambda_h, mu, dist);
}

PerformanceMetrics evaluate_with_flow_balance(const AdmissionPolicy& policy,
                                              const TrafficParams& params,
                                              const FixedPointOptions& options) {
    const DerivedRates rates = derive_rates(params);
    const double tolerance = options.relative_tolerance * std::max(params.lambda_n, 1.0);
    const double w = options.damping;

    double lambda_h = params.lambda_n * rates.p_h;
    double residual = 0.0;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        PerformanceMetrics m = evaluate(policy, params.lambda_n, lambda_h, rates.mu);
        const double rhs = handoff_balance_rhs(params, rates, m.p_block, m.p_drop);
        residual = std::abs(rhs - lambda_h);
        if (residual < tolerance) {
            m.fp_iterations = iter;
            m.fp_residual = residual;
            return m;
        }
        lambda_h = (1.0 - w) * lambda_h + w * rhs;
    }
    throw ConvergenceError(
        fmt::format("flow balance for {} did not converge in {} iterations (residual {:.3e})",
                    policy.label(), options.max_iterations, residual),
        lambda_h, residual, options.max_iterations);
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 9; ++k) {
        grid.push_back(k / 10.0);
    }
    return grid;
}

AlphaSearchResult optimal_alpha(int m, int n, int channels, const TrafficParams& params,
                                std::span<const double> alpha_grid,
                                const FixedPointOptions& options) {
    if (alpha_grid.empty()) {
        throw DomainError("alpha grid is empty");
    }
    AlphaSearchResult result;
    result.grid.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        const auto policy = AdmissionPolicy::acceptance_guard(channels, m, n, alpha);
        try {
            result.grid.push_back({alpha, evaluate_with_flow_balance(policy, params, options)});
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(fmt::format("alpha={}: {}", alpha, e.what()), e.last_lambda_h(),
                                   e.residual(), e.iterations());
        }
    }

    double best = result.grid.front().metrics.p_block;
    for (const auto& point : result.grid) {
        best = std::min(best, point.metrics.p_block);
    }
    const AlphaPoint* chosen = nullptr;
    for (const auto& point : result.grid) {
        const bool ties = point.metrics.p_block - best <= kAlphaTieTolerance * best;
        if (ties && (chosen == nullptr || point.alpha < chosen->alpha)) {
            chosen = &point;
        }
    }
    result.alpha_star = chosen->alpha;
    result.metrics = chosen->metrics;
    return result;
}

}  // namespace cac
