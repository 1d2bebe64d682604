// cacsweep: blocking/dropping analysis for guard-channel admission policies.
//
//   cacsweep solve       --config paper.json
//   cacsweep sweep       --config paper.json --out fig3.csv --chart fig3.svg
//   cacsweep alpha-scan  --config paper.json --out fig4.csv --summary fig4_opt.csv
//   cacsweep simulate    --config paper.json --seed 7
//   cacsweep chart       --csv fig4.csv --series ag:m=100:n=110:a=0.5 --log --out fig4.svg

#include <CLI11.hpp>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cac/chart.hpp"
#include "cac/config.hpp"
#include "cac/error.hpp"
#include "cac/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
    std::string config;
    std::string out;
    std::string chart;
    std::string alpha;
    std::string lambda_n;
    std::string flow_balance;
    std::string metric = "p_block";
    bool log_y = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double mu = 0.0;
};

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw cac::ConfigError("--flow-balance", fmt::format("'{}' is not a boolean", s));
}

void add_common(CLI::App* cmd, CommonArgs& a, bool with_chart) {
    cmd->add_option("--config", a.config, "JSON configuration (falls back to $CACSWEEP_CONFIG_DIR)");
    cmd->add_option("--out", a.out, "output file (default: config output.csv, else stdout)");
    cmd->add_option("--alpha", a.alpha, "comma-separated acceptance factors");
    cmd->add_option("--lambda-n", a.lambda_n, "new-call rate range start:stop:steps");
    cmd->add_option("--flow-balance", a.flow_balance, "solve the handoff fixed point (true/false)");
    cmd->add_option("--mu", a.mu, "override the channel release rate mu_a + eta");
    cmd->add_option("--seed", a.seed, "simulation master seed")->each([&a](const std::string&) {
        a.seed_given = true;
    });
    if (with_chart) {
        cmd->add_option("--chart", a.chart, "also render an SVG chart to this path");
        cmd->add_option("--metric", a.metric, "chart y column (p_block, p_drop, lambda_h)");
        cmd->add_flag("--log", a.log_y, "log-scale chart y axis");
    }
}

// Each acceptance_guard policy becomes one policy per listed alpha.
std::vector<cac::AdmissionPolicy> expand_alpha(const std::vector<cac::AdmissionPolicy>& policies,
                                               const std::vector<double>& alphas) {
    std::vector<cac::AdmissionPolicy> out;
    for (const auto& p : policies) {
        if (const auto* ag = std::get_if<cac::AcceptanceGuard>(&p.kind())) {
            for (double a : alphas) {
                out.push_back(cac::AdmissionPolicy::acceptance_guard(p.channels(), ag->m, ag->n, a));
            }
        } else {
            out.push_back(p);
        }
    }
    return out;
}

cac::ExperimentConfig load(const CommonArgs& a, bool expand_policies) {
    cac::ExperimentConfig cfg = cac::load_config(cac::resolve_config_path(a.config));
    if (!a.alpha.empty()) {
        cfg.alpha_grid = cac::parse_alpha_list(a.alpha);
        if (expand_policies) cfg.policies = expand_alpha(cfg.policies, cfg.alpha_grid);
    }
    if (!a.lambda_n.empty()) cfg.sweep = cac::parse_lambda_range(a.lambda_n);
    if (!a.flow_balance.empty()) cfg.flow_balance = parse_bool(a.flow_balance);
    if (a.mu > 0.0) cfg.traffic.mu_override = a.mu;
    if (a.seed_given) {
        if (!cfg.simulate) cfg.simulate = cac::SimTemplate{};
        cfg.simulate->seed = a.seed;
    }
    return cfg;
}

std::string output_path(const CommonArgs& a, const cac::ExperimentConfig& cfg) {
    return a.out.empty() ? cfg.csv_path : a.out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        cac::write_file(path, text);
    }
}

// Chart failures are reported but never touch the CSV already written.
bool emit_chart(const CommonArgs& a, const cac::ExperimentConfig& cfg, const std::string& csv,
                const std::string& title) {
    const std::string path = a.chart.empty() ? cfg.chart_path : a.chart;
    if (path.empty()) return true;
    try {
        cac::ChartOptions opts{a.metric, a.log_y, title};
        cac::write_file(path, cac::render_chart(csv, cac::series_in(csv), opts));
        return true;
    } catch (const std::exception& e) {
        std::cerr << "chart: " << e.what() << '\n';
        return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Call-admission-control blocking and dropping analysis"};
    app.require_subcommand(1);

    CommonArgs solve_args, sweep_args, scan_args, sim_args;
    std::size_t policy_index = 0;
    std::string summary_path;

    auto* solve = app.add_subcommand("solve", "metrics for one policy at the configured lambda_n");
    add_common(solve, solve_args, false);
    solve->add_option("--policy", policy_index, "index into the policies list");

    auto* sweep = app.add_subcommand("sweep", "analytical lambda_n sweep to CSV");
    add_common(sweep, sweep_args, true);

    auto* scan = app.add_subcommand("alpha-scan", "acceptance-factor grid per lambda_n");
    add_common(scan, scan_args, true);
    scan->add_option("--summary", summary_path, "also write the optimum summary here");

    auto* sim = app.add_subcommand("simulate", "discrete-event simulation of every policy");
    add_common(sim, sim_args, false);

    std::string chart_csv, chart_out, chart_metric = "p_block", chart_title;
    std::vector<std::string> chart_series;
    bool chart_log = false;
    auto* chart = app.add_subcommand("chart", "render a sweep CSV as SVG");
    chart->add_option("--csv", chart_csv, "input CSV")->required();
    chart->add_option("--series", chart_series, "policy labels to draw")->delimiter(',');
    chart->add_option("--metric", chart_metric, "y column");
    chart->add_option("--title", chart_title, "chart title");
    chart->add_flag("--log", chart_log, "log-scale y axis");
    chart->add_option("--out", chart_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto cfg = load(solve_args, true);
            std::string record;
            try {
                record = cac::run_solve(cfg, policy_index);
            } catch (const cac::ConvergenceError& e) {
                std::cerr << e.what() << " last lambda_h=" << e.last_lambda_h() << '\n';
                return kExitFailure;
            }
            emit(solve_args.out, record + '\n');
            return kExitOk;
        }
        if (*sweep) {
            const auto cfg = load(sweep_args, true);
            const auto table = cac::run_sweep(cfg);
            const std::string csv = cac::sweep_csv(table);
            emit(output_path(sweep_args, cfg), csv);
            const bool chart_ok = emit_chart(sweep_args, cfg, csv, "lambda_n sweep");
            if (!table.all_ok()) std::cerr << "sweep: some points failed; see status column\n";
            return table.all_ok() && chart_ok ? kExitOk : kExitFailure;
        }
        if (*scan) {
            const auto cfg = load(scan_args, false);
            const auto result = cac::run_alpha_scan(cfg);
            const std::string csv = cac::sweep_csv(result.table);
            emit(output_path(scan_args, cfg), csv);
            const std::string summary = cac::alpha_summary_text(result);
            if (!summary_path.empty()) cac::write_file(summary_path, summary);
            if (!output_path(scan_args, cfg).empty()) std::cout << summary;
            const bool chart_ok = emit_chart(scan_args, cfg, csv, "acceptance factor scan");
            return result.table.all_ok() && chart_ok ? kExitOk : kExitFailure;
        }
        if (*sim) {
            const auto cfg = load(sim_args, true);
            const auto rows = cac::run_simulations(cfg);
            emit(output_path(sim_args, cfg), cac::simulation_csv(rows));
            const bool ok = std::all_of(rows.begin(), rows.end(),
                                        [](const auto& r) { return r.status == "ok"; });
            return ok ? kExitOk : kExitFailure;
        }
        if (*chart) {
            std::ifstream in(chart_csv);
            if (!in) throw cac::ConfigError("--csv", fmt::format("cannot open '{}'", chart_csv));
            std::ostringstream text;
            text << in.rdbuf();
            const cac::ChartOptions opts{chart_metric, chart_log, chart_title};
            cac::write_file(chart_out, cac::render_chart(text.str(), chart_series, opts));
            return kExitOk;
        }
    } catch (const cac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cac::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
