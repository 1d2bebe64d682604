#include "cac/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <queue>

#include "cac/error.hpp"
#include "cac/parallel.hpp"
#include "cac/rng.hpp"

namespace cac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Departure {
    double time;
    double remaining;  // residual call length after leaving (CarryRemaining only)
    bool handoff_out;
};

struct LaterFirst {
    bool operator()(const Departure& a, const Departure& b) const { return a.time > b.time; }
};

struct BatchCounts {
    double new_offered = 0;
    double new_blocked = 0;
    double handoff_offered = 0;
    double handoff_dropped = 0;
    double duration = 0;
};

// Standard error of sum(num)/sum(den) from per-batch totals (delta method).
double batch_ratio_se(const std::vector<BatchCounts>& batches, double BatchCounts::*num,
                      double BatchCounts::*den) {
    const auto k = static_cast<double>(batches.size());
    if (batches.size() < 2) {
        return kNaN;
    }
    double sum_num = 0.0;
    double sum_den = 0.0;
    for (const auto& b : batches) {
        sum_num += b.*num;
        sum_den += b.*den;
    }
    if (sum_den <= 0.0) {
        return kNaN;
    }
    const double ratio = sum_num / sum_den;
    const double mean_den = sum_den / k;
    double ss = 0.0;
    for (const auto& b : batches) {
        const double d = b.*num - ratio * b.*den;
        ss += d * d;
    }
    return std::sqrt(ss / (k * (k - 1.0))) / mean_den;
}

double binomial_half_width(std::uint64_t hits, std::uint64_t trials) {
    if (trials == 0) {
        return kNaN;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

class CellSimulation {
public:
    explicit CellSimulation(const SimConfig& config)
        : config_(config),
          rates_(derive_rates(config.params)),
          closed_loop_(std::holds_alternative<ClosedLoopWraparound>(config.mode)),
          lambda_h_(closed_loop_ ? 0.0 : std::get<OpenLoop>(config.mode).lambda_h),
          warmup_(config.warmup_arrivals.value_or(default_warmup(config.target_arrivals))),
          new_arrivals_(config.seed, stream::kNewArrivals),
          handoff_arrivals_(config.seed, stream::kHandoffArrivals),
          holding_(config.seed, stream::kHolding),
          departure_type_(config.seed, stream::kDepartureType),
          admission_(config.seed, stream::kAdmission) {
        const auto batches =
            std::min<std::uint64_t>(static_cast<std::uint64_t>(config.batches), config.target_arrivals);
        batch_size_ = config.target_arrivals / batches;
        batches_.resize(batches);
    }

    SimReport run() {
        const double lambda_n = config_.params.lambda_n;
        double next_new = lambda_n > 0.0 ? new_arrivals_.exponential(lambda_n) : kInf;
        double next_handoff = lambda_h_ > 0.0 ? handoff_arrivals_.exponential(lambda_h_) : kInf;

        const std::uint64_t stop_at = warmup_ + config_.target_arrivals;
        while (basis_count_ < stop_at) {
            const double next_departure = departures_.empty() ? kInf : departures_.top().time;
            if (next_new <= next_handoff && next_new <= next_departure) {
                now_ = next_new;
                on_new_arrival();
                next_new = now_ + new_arrivals_.exponential(lambda_n);
            } else if (next_handoff <= next_departure) {
                now_ = next_handoff;
                on_handoff_arrival(holding_.exponential(config_.params.mu_a));
                next_handoff = now_ + handoff_arrivals_.exponential(lambda_h_);
            } else {
                const Departure d = departures_.top();
                departures_.pop();
                now_ = d.time;
                --occupancy_;
                assert(occupancy_ >= 0);
                if (d.handoff_out && closed_loop_) {
                    on_handoff_arrival(d.remaining);
                }
            }
        }
        close_batch();
        return report();
    }

private:
    bool measuring() const { return basis_count_ > warmup_; }

    // Advances the counted-arrival index; called before an arrival of the basis class is tallied.
    void count_basis_arrival() {
        if (basis_count_ == warmup_) {
            measure_start_ = now_;
            batch_start_ = now_;
        }
        ++basis_count_;
        if (measuring()) {
            const std::uint64_t index = basis_count_ - warmup_ - 1;
            const std::size_t batch =
                std::min<std::size_t>(index / batch_size_, batches_.size() - 1);
            if (batch != current_batch_) {
                close_batch();
                current_batch_ = batch;
            }
        }
    }

    void close_batch() {
        batches_[current_batch_].duration = now_ - batch_start_;
        batch_start_ = now_;
    }

    void on_new_arrival() {
        if (config_.basis == TargetBasis::NewArrivals) count_basis_arrival();
        const double a = admission_probability(config_.policy, occupancy_);
        // The coin is drawn in every state so the admission stream stays aligned across policies.
        const bool admitted = admission_.uniform() < a;
        if (measuring()) {
            ++new_offered_;
            batches_[current_batch_].new_offered += 1;
            if (!admitted) {
                ++new_blocked_;
                batches_[current_batch_].new_blocked += 1;
            }
        }
        if (admitted) {
            const double call_length = config_.holding == HoldingModel::CarryRemaining
                                           ? holding_.exponential(config_.params.mu_a)
                                           : 0.0;
            admit(call_length);
        }
    }

    void on_handoff_arrival(double remaining) {
        if (config_.basis == TargetBasis::HandoffArrivals) count_basis_arrival();
        const bool admitted = occupancy_ < config_.policy.channels();
        if (measuring()) {
            ++handoff_offered_;
            batches_[current_batch_].handoff_offered += 1;
            if (!admitted) {
                ++handoff_dropped_;
                batches_[current_batch_].handoff_dropped += 1;
            }
        }
        if (admitted) admit(remaining);
    }

    void admit(double remaining_call) {
        ++occupancy_;
        max_occupancy_ = std::max(max_occupancy_, occupancy_);
        if (config_.holding == HoldingModel::FreshDraw) {
            const double hold = holding_.exponential(rates_.mu);
            const bool out = departure_type_.bernoulli(rates_.p_h);
            departures_.push({now_ + hold, 0.0, out});
        } else {
            const double dwell = departure_type_.exponential(config_.params.eta);
            if (dwell < remaining_call) {
                departures_.push({now_ + dwell, remaining_call - dwell, true});
            } else {
                departures_.push({now_ + remaining_call, 0.0, false});
            }
        }
    }

    SimReport report() const {
        SimReport r;
        r.seed = config_.seed;
        r.new_offered = new_offered_;
        r.new_blocked = new_blocked_;
        r.handoff_offered = handoff_offered_;
        r.handoff_dropped = handoff_dropped_;
        r.p_block_hat = new_offered_ > 0 ? static_cast<double>(new_blocked_) /
                                               static_cast<double>(new_offered_)
                                         : kNaN;
        r.p_drop_hat = handoff_offered_ > 0 ? static_cast<double>(handoff_dropped_) /
                                                  static_cast<double>(handoff_offered_)
                                            : kNaN;
        r.ci95_block = binomial_half_width(new_blocked_, new_offered_);
        r.ci95_drop = binomial_half_width(handoff_dropped_, handoff_offered_);
        r.se_block = batch_ratio_se(batches_, &BatchCounts::new_blocked, &BatchCounts::new_offered);
        r.se_drop = batch_ratio_se(batches_, &BatchCounts::handoff_dropped,
                                   &BatchCounts::handoff_offered);
        r.measured_time = now_ - measure_start_;
        r.measured_lambda_h =
            r.measured_time > 0.0 ? static_cast<double>(handoff_offered_) / r.measured_time : 0.0;
        r.se_lambda_h =
            batch_ratio_se(batches_, &BatchCounts::handoff_offered, &BatchCounts::duration);
        r.max_occupancy = max_occupancy_;
        return r;
    }

    const SimConfig& config_;
    DerivedRates rates_;
    bool closed_loop_;
    double lambda_h_;
    std::uint64_t warmup_;

    RandomStream new_arrivals_;
    RandomStream handoff_arrivals_;
    RandomStream holding_;
    RandomStream departure_type_;
    RandomStream admission_;

    std::priority_queue<Departure, std::vector<Departure>, LaterFirst> departures_;
    double now_ = 0.0;
    int occupancy_ = 0;
    int max_occupancy_ = 0;

    std::uint64_t basis_count_ = 0;
    double measure_start_ = 0.0;
    std::uint64_t new_offered_ = 0;
    std::uint64_t new_blocked_ = 0;
    std::uint64_t handoff_offered_ = 0;
    std::uint64_t handoff_dropped_ = 0;

    std::uint64_t batch_size_ = 1;
    std::vector<BatchCounts> batches_;
    std::size_t current_batch_ = 0;
    double batch_start_ = 0.0;
};

void validate(const SimConfig& config) {
    validate(config.params);
    if (config.target_arrivals < 1) {
        throw DomainError("target_arrivals must be >= 1");
    }
    if (config.batches < 1) {
        throw DomainError("batches must be >= 1");
    }
    if (const auto* open = std::get_if<OpenLoop>(&config.mode)) {
        if (!std::isfinite(open->lambda_h) || open->lambda_h < 0.0) {
            throw DomainError("open-loop lambda_h must be finite and >= 0");
        }
    }
    if (config.holding == HoldingModel::CarryRemaining && config.params.mu_override) {
        throw DomainError("CarryRemaining holding cannot honour a mu override");
    }

    const bool closed = std::holds_alternative<ClosedLoopWraparound>(config.mode);
    const double lambda_n = config.params.lambda_n;
    if (config.basis == TargetBasis::NewArrivals && lambda_n == 0.0) {
        throw DegenerateRun("no new calls are offered (lambda_n = 0); count handoff arrivals instead");
    }
    if (config.basis == TargetBasis::HandoffArrivals) {
        const bool feeds = closed ? lambda_n > 0.0 && admission_probability(config.policy, 0) > 0.0
                                  : std::get<OpenLoop>(config.mode).lambda_h > 0.0;
        if (!feeds) {
            throw DegenerateRun("no handoff calls can ever be offered");
        }
    }
}

}  // namespace

std::uint64_t default_warmup(std::uint64_t target_arrivals) {
    return std::max<std::uint64_t>(target_arrivals / 10, 10'000);
}

SimReport simulate(const SimConfig& config) {
    validate(config);
    CellSimulation sim(config);
    return sim.run();
}

std::vector<BatchOutcome> batch_simulate(const std::vector<SimConfig>& configs) {
    if (configs.empty()) {
        throw DomainError("batch_simulate needs at least one config");
    }
    std::vector<BatchOutcome> out(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) {
        try {
            out[i].report = simulate(configs[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

}  // namespace cac
