#include "cac/sweep.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>

#include "cac/error.hpp"
#include "cac/parallel.hpp"

namespace cac {

namespace {

std::string sanitize(std::string_view message) {
    std::string out(message);
    std::replace(out.begin(), out.end(), ',', ';');
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

std::optional<double> alpha_of(const AdmissionPolicy& policy) {
    if (const auto* ag = std::get_if<AcceptanceGuard>(&policy.kind())) return ag->alpha;
    return std::nullopt;
}

TrafficParams at_rate(TrafficParams traffic, double lambda_n) {
    traffic.lambda_n = lambda_n;
    return traffic;
}

PerformanceMetrics analytic(const ExperimentConfig& config, const AdmissionPolicy& policy,
                            const TrafficParams& traffic) {
    if (config.flow_balance) return evaluate_with_flow_balance(policy, traffic, config.fixed_point);
    return evaluate(policy, traffic.lambda_n, config.lambda_h, derive_rates(traffic).mu);
}

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

double to_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw DomainError(fmt::format("malformed number '{}'", s));
    }
    return v;
}

std::optional<double> to_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return to_double(s);
}

}  // namespace

bool SweepTable::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
}

SimConfig make_sim_config(const SimTemplate& tmpl, const AdmissionPolicy& policy,
                          const TrafficParams& traffic, double lambda_h) {
    SimConfig sim{policy, traffic};
    if (tmpl.closed_loop) {
        sim.mode = ClosedLoopWraparound{};
    } else {
        sim.mode = OpenLoop{lambda_h};
    }
    sim.seed = tmpl.seed;
    sim.target_arrivals = tmpl.target_arrivals;
    sim.warmup_arrivals = tmpl.warmup_arrivals;
    sim.holding = tmpl.holding;
    return sim;
}

SweepTable run_sweep(const ExperimentConfig& config) {
    const auto rates = config.sweep.values();
    const std::size_t per_point = config.policies.size();
    SweepTable table;
    table.with_simulation = config.simulate.has_value();
    table.rows.resize(rates.size() * per_point);

    parallel_for(table.rows.size(), [&](std::size_t k) {
        const double lambda_n = rates[k / per_point];
        const AdmissionPolicy& policy = config.policies[k % per_point];
        SweepRow& row = table.rows[k];
        row.lambda_n = lambda_n;
        row.policy = policy.label();
        row.alpha = alpha_of(policy);
        const TrafficParams traffic = at_rate(config.traffic, lambda_n);
        try {
            const PerformanceMetrics m = analytic(config, policy, traffic);
            row.lambda_h = m.lambda_h;
            row.p_block = m.p_block;
            row.p_drop = m.p_drop;
            row.fp_iterations = m.fp_iterations;
        } catch (const std::exception& e) {
            row.status = "error: " + sanitize(e.what());
            return;
        }
        if (config.simulate) {
            try {
                const SimReport r =
                    simulate(make_sim_config(*config.simulate, policy, traffic, row.lambda_h));
                row.sim_p_block = r.p_block_hat;
                row.sim_p_drop = r.p_drop_hat;
                row.sim_ci_block = r.ci95_block;
                row.sim_ci_drop = r.ci95_drop;
            } catch (const std::exception& e) {
                row.status = "sim_error: " + sanitize(e.what());
            }
        }
    });
    return table;
}

AlphaScan run_alpha_scan(const ExperimentConfig& config) {
    const auto it = std::find_if(config.policies.begin(), config.policies.end(), [](const auto& p) {
        return std::holds_alternative<AcceptanceGuard>(p.kind());
    });
    if (it == config.policies.end()) {
        throw ConfigError("policies", "alpha-scan needs an acceptance_guard policy");
    }
    const auto guard = std::get<AcceptanceGuard>(it->kind());
    const int channels = it->channels();
    const auto& grid = config.alpha_grid;
    if (grid.empty()) throw ConfigError("alpha_grid", "expected a nonempty array");
    const double grid_max = *std::max_element(grid.begin(), grid.end());

    const auto rates = config.sweep.values();
    AlphaScan scan;
    scan.table.rows.resize(rates.size() * grid.size());
    scan.optimum.resize(rates.size());

    parallel_for(rates.size(), [&](std::size_t k) {
        const TrafficParams traffic = at_rate(config.traffic, rates[k]);
        AlphaOptimum& opt = scan.optimum[k];
        opt.lambda_n = rates[k];
        for (std::size_t j = 0; j < grid.size(); ++j) {
            SweepRow& row = scan.table.rows[k * grid.size() + j];
            const auto policy = AdmissionPolicy::acceptance_guard(channels, guard.m, guard.n, grid[j]);
            row.lambda_n = rates[k];
            row.policy = policy.label();
            row.alpha = grid[j];
            try {
                const PerformanceMetrics m = analytic(config, policy, traffic);
                row.lambda_h = m.lambda_h;
                row.p_block = m.p_block;
                row.p_drop = m.p_drop;
                row.fp_iterations = m.fp_iterations;
            } catch (const std::exception& e) {
                row.status = "error: " + sanitize(e.what());
                opt.ok = false;
            }
        }
        if (!opt.ok) return;
        if (config.flow_balance) {
            const AlphaSearchResult best = optimal_alpha(guard.m, guard.n, channels, traffic, grid, config.fixed_point);
            opt.alpha_star = best.alpha_star;
            opt.p_block = best.metrics.p_block;
        } else {
            // Same tie rule as optimal_alpha, applied to the fixed-lambda_h rows.
            const auto first = scan.table.rows.begin() + static_cast<std::ptrdiff_t>(k * grid.size());
            const auto last = first + static_cast<std::ptrdiff_t>(grid.size());
            double best = first->p_block;
            for (auto r = first; r != last; ++r) best = std::min(best, r->p_block);
            const SweepRow* chosen = nullptr;
            for (auto r = first; r != last; ++r) {
                if (r->p_block - best <= kAlphaTieTolerance * best &&
                    (chosen == nullptr || *r->alpha < *chosen->alpha)) {
                    chosen = &*r;
                }
            }
            opt.alpha_star = *chosen->alpha;
            opt.p_block = chosen->p_block;
        }
    });

    for (const auto& opt : scan.optimum) {
        if (opt.ok && opt.alpha_star < grid_max) {
            scan.crossover_lambda_n = opt.lambda_n;
            break;
        }
    }
    return scan;
}

std::string alpha_summary_text(const AlphaScan& scan) {
    std::string out = "lambda_n,alpha_star,p_block,status\n";
    for (const auto& opt : scan.optimum) {
        if (opt.ok) {
            out += fmt::format("{},{},{},ok\n", format_number(opt.lambda_n),
                               format_number(opt.alpha_star), format_number(opt.p_block));
        } else {
            out += fmt::format("{},,,error\n", format_number(opt.lambda_n));
        }
    }
    out += fmt::format("crossover_lambda_n,{}\n",
                       scan.crossover_lambda_n ? format_number(*scan.crossover_lambda_n) : "none");
    return out;
}

std::string run_solve(const ExperimentConfig& config, std::size_t policy_index) {
    if (policy_index >= config.policies.size()) {
        throw ConfigError("--policy", fmt::format("index {} but only {} policies", policy_index,
                                                  config.policies.size()));
    }
    const PerformanceMetrics m = analytic(config, config.policies[policy_index], config.traffic);
    nlohmann::ordered_json record;
    record["lambda_n"] = config.traffic.lambda_n;
    record["lambda_h"] = m.lambda_h;
    record["p_block"] = m.p_block;
    record["p_drop"] = m.p_drop;
    record["fp_iterations"] = m.fp_iterations;
    record["fp_residual"] = m.fp_residual;
    return record.dump();
}

std::vector<SimulationRow> run_simulations(const ExperimentConfig& config) {
    const SimTemplate tmpl = config.simulate.value_or(SimTemplate{});
    std::vector<SimulationRow> rows(config.policies.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        const AdmissionPolicy& policy = config.policies[k];
        SimulationRow& row = rows[k];
        row.policy = policy.label();
        row.lambda_n = config.traffic.lambda_n;
        try {
            const PerformanceMetrics m = analytic(config, policy, config.traffic);
            row.analytic_lambda_h = m.lambda_h;
            row.analytic_p_block = m.p_block;
            row.analytic_p_drop = m.p_drop;
            row.report = simulate(make_sim_config(tmpl, policy, config.traffic, m.lambda_h));
        } catch (const std::exception& e) {
            row.status = "error: " + sanitize(e.what());
        }
    });
    return rows;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string sweep_csv(const SweepTable& table) {
    std::string out = "lambda_n,policy,alpha,lambda_h,p_block,p_drop,fp_iterations";
    if (table.with_simulation) out += ",sim_p_block,sim_p_drop,sim_ci_block,sim_ci_drop";
    out += ",status\n";
    for (const auto& r : table.rows) {
        out += format_number(r.lambda_n) + ',' + r.policy + ',' + optional_number(r.alpha) + ',';
        if (r.status.rfind("error", 0) == 0) {
            out += ",,,";
        } else {
            out += fmt::format("{},{},{},{}", format_number(r.lambda_h), format_number(r.p_block),
                               format_number(r.p_drop), r.fp_iterations);
        }
        if (table.with_simulation) {
            out += fmt::format(",{},{},{},{}", optional_number(r.sim_p_block),
                               optional_number(r.sim_p_drop), optional_number(r.sim_ci_block),
                               optional_number(r.sim_ci_drop));
        }
        out += ',' + r.status + '\n';
    }
    return out;
}

std::string simulation_csv(const std::vector<SimulationRow>& rows) {
    std::string out =
        "policy,lambda_n,seed,new_offered,new_blocked,handoff_offered,handoff_dropped,"
        "p_block_hat,p_drop_hat,ci95_block,ci95_drop,se_block,se_drop,measured_lambda_h,"
        "se_lambda_h,analytic_lambda_h,analytic_p_block,analytic_p_drop,status\n";
    for (const auto& row : rows) {
        out += row.policy + ',' + format_number(row.lambda_n) + ',';
        if (row.report) {
            const SimReport& r = *row.report;
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},", r.seed, r.new_offered,
                               r.new_blocked, r.handoff_offered, r.handoff_dropped,
                               format_number(r.p_block_hat), format_number(r.p_drop_hat),
                               format_number(r.ci95_block), format_number(r.ci95_drop),
                               format_number(r.se_block), format_number(r.se_drop),
                               format_number(r.measured_lambda_h), format_number(r.se_lambda_h));
        } else {
            out += ",,,,,,,,,,,,,";
        }
        out += fmt::format("{},{},{},{}\n", format_number(row.analytic_lambda_h),
                           format_number(row.analytic_p_block), format_number(row.analytic_p_drop),
                           row.status);
    }
    return out;
}

std::optional<std::size_t> CsvData::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

CsvData parse_csv(std::string_view text) {
    auto split = [](std::string_view line) {
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.emplace_back(line.substr(pos, comma == line.npos ? line.npos : comma - pos));
            if (comma == line.npos) break;
            pos = comma + 1;
        }
        return fields;
    };
    CsvData data;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
        pos = nl == text.npos ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto fields = split(line);
        if (first) {
            data.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != data.header.size()) {
                throw DomainError(fmt::format("malformed CSV: row {} has {} fields, header has {}",
                                              data.rows.size() + 1, fields.size(),
                                              data.header.size()));
            }
            data.rows.push_back(std::move(fields));
        }
    }
    if (first) throw DomainError("malformed CSV: no header");
    return data;
}

SweepTable parse_sweep_csv(std::string_view text) {
    const CsvData csv = parse_csv(text);
    auto col = [&](std::string_view name) {
        const auto c = csv.column(name);
        if (!c) throw DomainError(fmt::format("malformed CSV: missing column '{}'", name));
        return *c;
    };
    const auto c_lambda_n = col("lambda_n"), c_policy = col("policy"), c_alpha = col("alpha"),
               c_lambda_h = col("lambda_h"), c_block = col("p_block"), c_drop = col("p_drop"),
               c_iter = col("fp_iterations"), c_status = col("status");
    SweepTable table;
    table.with_simulation = csv.column("sim_p_block").has_value();
    for (const auto& f : csv.rows) {
        SweepRow r;
        r.lambda_n = to_double(f[c_lambda_n]);
        r.policy = f[c_policy];
        r.alpha = to_optional(f[c_alpha]);
        r.status = f[c_status];
        if (!f[c_block].empty()) {
            r.lambda_h = to_double(f[c_lambda_h]);
            r.p_block = to_double(f[c_block]);
            r.p_drop = to_double(f[c_drop]);
            r.fp_iterations = std::atoi(f[c_iter].c_str());
        }
        if (table.with_simulation) {
            r.sim_p_block = to_optional(f[col("sim_p_block")]);
            r.sim_p_drop = to_optional(f[col("sim_p_drop")]);
            r.sim_ci_block = to_optional(f[col("sim_ci_block")]);
            r.sim_ci_drop = to_optional(f[col("sim_ci_drop")]);
        }
        table.rows.push_back(std::move(r));
    }
    return table;
}

void write_file(const std::string& path, std::string_view text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error(fmt::format("cannot write '{}'", path));
    }
}

}  // namespace cac
