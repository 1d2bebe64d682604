#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cac/admission.hpp"
#include "cac/simulator.hpp"
#include "cac/traffic.hpp"

namespace cac {

/// Inclusive linear range of new-call rates.
struct LambdaRange {
    double start = 0.2;
    double stop = 3.0;
    int steps = 30;

    std::vector<double> values() const;
};

/// LambdaRange from "start:stop:steps". Throws ConfigError on bad input.
LambdaRange parse_lambda_range(std::string_view text);

/// Comma-separated probabilities, e.g. "0.1,0.5,0.9".
std::vector<double> parse_alpha_list(std::string_view text);

struct SimTemplate {
    bool closed_loop = false;
    std::uint64_t seed = 1;
    std::uint64_t target_arrivals = 200'000;
    std::optional<std::uint64_t> warmup_arrivals;
    HoldingModel holding = HoldingModel::FreshDraw;
};

/// Everything one CLI invocation needs. Traffic lambda_n is the operating
/// point for `solve`/`simulate`; `sweep` replaces it with the range.
struct ExperimentConfig {
    int channels = 130;
    TrafficParams traffic{1.0, 1.0 / 120.0, 1.0 / 360.0, std::nullopt};
    std::vector<AdmissionPolicy> policies;
    bool flow_balance = true;
    double lambda_h = 0.0;  ///< used when flow_balance is false
    LambdaRange sweep;
    std::vector<double> alpha_grid = default_alpha_grid();
    FixedPointOptions fixed_point;
    std::optional<SimTemplate> simulate;
    std::string csv_path;
    std::string chart_path;
};

/// Parses the JSON configuration text. Mean-time fields (call_mean_s,
/// dwell_mean_s) are converted to rates. Throws ConfigError naming the field.
ExperimentConfig parse_config(std::string_view json_text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// The shipped preset: 130 channels, thresholds 100/110, means 120 s / 360 s.
ExperimentConfig paper_preset();

inline constexpr const char* kConfigDirEnv = "CACSWEEP_CONFIG_DIR";

/// Resolves a --config argument: as given if it exists, else relative to
/// $CACSWEEP_CONFIG_DIR. An empty argument selects paper.json from that directory.
std::filesystem::path resolve_config_path(const std::string& arg);

}  // namespace cac
