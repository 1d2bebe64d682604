#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cac/admission.hpp"
#include "cac/config.hpp"
#include "cac/simulator.hpp"

namespace cac {

struct SweepRow {
    double lambda_n = 0.0;
    std::string policy;
    std::optional<double> alpha;
    double lambda_h = 0.0;
    double p_block = 0.0;
    double p_drop = 0.0;
    int fp_iterations = 0;
    std::optional<double> sim_p_block;
    std::optional<double> sim_p_drop;
    std::optional<double> sim_ci_block;
    std::optional<double> sim_ci_drop;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SweepTable {
    std::vector<SweepRow> rows;
    bool with_simulation = false;

    bool all_ok() const;
};

/// One row per (lambda_n, policy), lambda_n ascending, policies in config order.
/// Per-point failures become status rows. Points evaluate concurrently.
SweepTable run_sweep(const ExperimentConfig& config);

struct AlphaOptimum {
    double lambda_n = 0.0;
    double alpha_star = 0.0;
    double p_block = 0.0;
    bool ok = true;
};

struct AlphaScan {
    SweepTable table;  ///< one row per (lambda_n, alpha)
    std::vector<AlphaOptimum> optimum;
    /// Smallest lambda_n whose optimum lies below the largest grid value.
    std::optional<double> crossover_lambda_n;
};

/// Scans the config's alpha grid for the first acceptance_guard policy's (m, n).
AlphaScan run_alpha_scan(const ExperimentConfig& config);

std::string alpha_summary_text(const AlphaScan& scan);

/// One single-line JSON record for the policy at the config's operating point.
/// Throws ConvergenceError when the flow balance fails.
std::string run_solve(const ExperimentConfig& config, std::size_t policy_index = 0);

struct SimulationRow {
    std::string policy;
    double lambda_n = 0.0;
    double analytic_lambda_h = 0.0;
    double analytic_p_block = 0.0;
    double analytic_p_drop = 0.0;
    std::optional<SimReport> report;
    std::string status = "ok";
};

/// Simulates every policy at the config's operating point. Open-loop runs use
/// the analytical handoff rate (fixed point, or lambda_h when flow balance is off).
std::vector<SimulationRow> run_simulations(const ExperimentConfig& config);

SimConfig make_sim_config(const SimTemplate& tmpl, const AdmissionPolicy& policy,
                          const TrafficParams& traffic, double lambda_h);

/// Shortest-roundtrip-safe rendering used for every numeric CSV field.
std::string format_number(double v);

std::string sweep_csv(const SweepTable& table);
std::string simulation_csv(const std::vector<SimulationRow>& rows);

/// Minimal CSV reader for files written by this tool: header row plus data rows.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
};

/// Throws DomainError on ragged rows or an empty input.
CsvData parse_csv(std::string_view text);

/// Parses sweep_csv output back into rows.
SweepTable parse_sweep_csv(std::string_view text);

/// Writes text to path atomically (temp file then rename). Throws std::runtime_error.
void write_file(const std::string& path, std::string_view text);

}  // namespace cac
