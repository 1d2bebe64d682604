#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cac {

/// Birth rates b(0..C-1) of a chain on states 0..C. Death rate in state i is i*mu.
class BirthRateProfile {
public:
    /// Throws DomainError when empty or when any rate is negative or non-finite.
    explicit BirthRateProfile(std::vector<double> rates);

    int channels() const noexcept { return static_cast<int>(rates_.size()); }
    double rate_at(int state) const;
    std::span<const double> rates() const noexcept { return rates_; }

private:
    std::vector<double> rates_;
};

struct StationaryDistribution {
    std::vector<double> probs;  ///< P(0..C)
    /// log of sum_i prod_{k<i} b(k)/((k+1) mu), i.e. log(1/P(0)) when P(0) > 0.
    double log_norm = 0.0;

    int channels() const noexcept { return static_cast<int>(probs.size()) - 1; }
};

/// Forward ratio recurrence with rescaling; safe for C in the hundreds and
/// offered loads far beyond C.
StationaryDistribution stationary_distribution(const BirthRateProfile& profile, double mu);

inline constexpr int kDenseOracleMaxChannels = 64;

/// Solves pi Q = 0, sum(pi) = 1 by LU elimination on the generator of the
/// closed class below the first zero birth rate (the full chain when none is zero).
/// Test oracle only; throws UnsupportedSize above kDenseOracleMaxChannels.
StationaryDistribution stationary_distribution_dense_oracle(const BirthRateProfile& profile,
                                                            double mu);

/// sum_{i >= from} P(i).
double tail_mass(const StationaryDistribution& dist, int from);

}  // namespace cac
