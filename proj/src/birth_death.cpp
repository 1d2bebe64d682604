#include "cac/birth_death.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "cac/error.hpp"

namespace cac {

namespace {

constexpr double kRescaleAbove = 1e200;

void require_mu(double mu) {
    if (!std::isfinite(mu) || mu <= 0.0) {
        throw DomainError("mu must be finite and > 0");
    }
}

}  // namespace

BirthRateProfile::BirthRateProfile(std::vector<double> rates) : rates_(std::move(rates)) {
    if (rates_.empty()) {
        throw DomainError("birth rate profile needs at least one channel");
    }
    for (std::size_t i = 0; i < rates_.size(); ++i) {
        if (!std::isfinite(rates_[i]) || rates_[i] < 0.0) {
            throw DomainError("birth rate b(" + std::to_string(i) + ") must be finite and >= 0");
        }
    }
}

double BirthRateProfile::rate_at(int state) const {
    if (state < 0 || state >= channels()) {
        throw IndexError("birth rate state " + std::to_string(state) + " outside 0.." +
                         std::to_string(channels() - 1));
    }
    return rates_[static_cast<std::size_t>(state)];
}

StationaryDistribution stationary_distribution(const BirthRateProfile& profile, double mu) {
    require_mu(mu);
    const int c = profile.channels();
    const auto b = profile.rates();

    // w[i] holds prod b(k)/((k+1) mu) times exp(-log_scale).
    std::vector<double> w(static_cast<std::size_t>(c) + 1, 0.0);
    double log_scale = 0.0;
    w[0] = 1.0;
    for (int i = 1; i <= c; ++i) {
        const double ratio = b[static_cast<std::size_t>(i - 1)] / (static_cast<double>(i) * mu);
        if (ratio == 0.0) {
            break;  // unreachable beyond here; entries stay exactly zero
        }
        double next = w[static_cast<std::size_t>(i - 1)] * ratio;
        if (next > kRescaleAbove || !std::isfinite(next)) {
            for (int k = 0; k < i; ++k) {
                w[static_cast<std::size_t>(k)] /= kRescaleAbove;
            }
            log_scale += std::log(kRescaleAbove);
            next = w[static_cast<std::size_t>(i - 1)] * ratio;
        }
        w[static_cast<std::size_t>(i)] = next;
    }

    double sum = 0.0;
    for (double v : w) {
        sum += v;
    }
    StationaryDistribution dist;
    dist.log_norm = std::log(sum) + log_scale;
    dist.probs.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        dist.probs[i] = w[i] / sum;
    }
    return dist;
}

StationaryDistribution stationary_distribution_dense_oracle(const BirthRateProfile& profile,
                                                            double mu) {
    require_mu(mu);
    const int c = profile.channels();
    if (c > kDenseOracleMaxChannels) {
        throw UnsupportedSize("dense oracle supports at most " +
                              std::to_string(kDenseOracleMaxChannels) + " channels, got " +
                              std::to_string(c));
    }
    // States above the first zero birth rate are transient; solve on the closed class 0..top.
    int top = c;
    for (int i = 0; i < c; ++i) {
        if (profile.rate_at(i) == 0.0) {
            top = i;
            break;
        }
    }
    const int n = top + 1;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (i < top) {
            q(i, i + 1) = profile.rate_at(i);
        }
        if (i > 0) {
            q(i, i - 1) = i * mu;
        }
        q(i, i) = -q.row(i).sum();
    }

    // Transposed balance equations, last one replaced by normalization.
    Eigen::MatrixXd a = q.transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);

    StationaryDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(c) + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        dist.probs[static_cast<std::size_t>(i)] = std::max(pi(i), 0.0);
    }
    dist.log_norm = dist.probs[0] > 0.0 ? -std::log(dist.probs[0]) : 0.0;
    return dist;
}

double tail_mass(const StationaryDistribution& dist, int from) {
    const int c = dist.channels();
    if (from < 0 || from > c) {
        throw IndexError("tail index " + std::to_string(from) + " outside 0.." + std::to_string(c));
    }
    if (from == 0) {
        return 1.0;
    }
    double sum = 0.0;
    for (int i = from; i <= c; ++i) {
        sum += dist.probs[static_cast<std::size_t>(i)];
    }
    return sum;
}

}  // namespace cac
