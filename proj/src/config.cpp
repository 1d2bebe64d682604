#include "cac/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cac/error.hpp"

namespace cac {

using nlohmann::json;

namespace {

double parse_double(std::string_view text, const std::string& field) {
    std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw ConfigError(field, fmt::format("'{}' is not a finite number", s));
    }
    return v;
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr || !v->is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(path, "must be finite");
    }
    return d;
}

int get_int(const json& obj, const char* key, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr || !v->is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return v->get<int>();
}

double positive(double v, const std::string& path) {
    if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
    return v;
}

// Either a rate key or a mean-time key, never both.
double rate_or_mean(const json& t, const char* rate_key, const char* mean_key) {
    const bool has_rate = find(t, rate_key) != nullptr;
    const bool has_mean = find(t, mean_key) != nullptr;
    const std::string rate_path = std::string("traffic.") + rate_key;
    const std::string mean_path = std::string("traffic.") + mean_key;
    if (has_rate && has_mean) {
        throw ConfigError(rate_path, fmt::format("give either {} or {}, not both", rate_key, mean_key));
    }
    if (has_rate) return positive(get_number(t, rate_key, rate_path), rate_path);
    if (has_mean) return 1.0 / positive(get_number(t, mean_key, mean_path), mean_path);
    throw ConfigError(rate_path, fmt::format("missing ({} or {} required)", rate_key, mean_key));
}

AdmissionPolicy parse_policy(const json& p, int default_channels, const std::string& path) {
    if (!p.is_object()) throw ConfigError(path, "expected an object");
    const json* kind = find(p, "kind");
    if (kind == nullptr || !kind->is_string()) throw ConfigError(path + ".kind", "expected a string");
    const int c = find(p, "channels") ? get_int(p, "channels", path + ".channels") : default_channels;
    const std::string k = kind->get<std::string>();
    try {
        if (k == "non_priority") return AdmissionPolicy::non_priority(c);
        if (k == "new_call_bounding") {
            return AdmissionPolicy::new_call_bounding(c, get_int(p, "m", path + ".m"));
        }
        if (k == "acceptance_guard") {
            return AdmissionPolicy::acceptance_guard(c, get_int(p, "m", path + ".m"),
                                                     get_int(p, "n", path + ".n"),
                                                     get_number(p, "alpha", path + ".alpha"));
        }
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".kind",
                      fmt::format("unknown policy '{}' (non_priority, new_call_bounding, "
                                  "acceptance_guard)",
                                  k));
}

SimTemplate parse_sim(const json& s) {
    if (!s.is_object()) throw ConfigError("simulate", "expected an object");
    SimTemplate t;
    if (const json* mode = find(s, "mode")) {
        const std::string m = mode->is_string() ? mode->get<std::string>() : "";
        if (m == "open_loop") {
            t.closed_loop = false;
        } else if (m == "closed_loop") {
            t.closed_loop = true;
        } else {
            throw ConfigError("simulate.mode", "expected \"open_loop\" or \"closed_loop\"");
        }
    }
    if (const json* v = find(s, "seed")) {
        if (!v->is_number_unsigned()) throw ConfigError("simulate.seed", "expected an unsigned integer");
        t.seed = v->get<std::uint64_t>();
    }
    if (const json* v = find(s, "target_arrivals")) {
        if (!v->is_number_unsigned() || v->get<std::uint64_t>() < 1) {
            throw ConfigError("simulate.target_arrivals", "expected an integer >= 1");
        }
        t.target_arrivals = v->get<std::uint64_t>();
    }
    if (const json* v = find(s, "warmup_arrivals")) {
        if (!v->is_number_unsigned()) {
            throw ConfigError("simulate.warmup_arrivals", "expected an unsigned integer");
        }
        t.warmup_arrivals = v->get<std::uint64_t>();
    }
    if (const json* v = find(s, "holding")) {
        const std::string h = v->is_string() ? v->get<std::string>() : "";
        if (h == "fresh") {
            t.holding = HoldingModel::FreshDraw;
        } else if (h == "carry") {
            t.holding = HoldingModel::CarryRemaining;
        } else {
            throw ConfigError("simulate.holding", "expected \"fresh\" or \"carry\"");
        }
    }
    return t;
}

}  // namespace

std::vector<double> LambdaRange::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    if (steps == 1) {
        out.push_back(start);
        return out;
    }
    for (int k = 0; k < steps; ++k) {
        out.push_back(start + (stop - start) * k / (steps - 1));
    }
    return out;
}

LambdaRange parse_lambda_range(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos) {
        throw ConfigError("--lambda-n", "expected start:stop:steps");
    }
    LambdaRange r;
    r.start = parse_double(text.substr(0, first), "--lambda-n");
    r.stop = parse_double(text.substr(first + 1, second - first - 1), "--lambda-n");
    const auto steps_text = text.substr(second + 1);
    const auto [ptr, ec] = std::from_chars(steps_text.data(), steps_text.data() + steps_text.size(), r.steps);
    if (ec != std::errc{} || ptr != steps_text.data() + steps_text.size()) {
        throw ConfigError("--lambda-n", "steps must be an integer");
    }
    if (!(r.start > 0.0) || r.stop < r.start || r.steps < 1) {
        throw ConfigError("--lambda-n", "need start > 0, stop >= start, steps >= 1");
    }
    return r;
}

std::vector<double> parse_alpha_list(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
        const double a = parse_double(item, "--alpha");
        if (a < 0.0 || a > 1.0) throw ConfigError("--alpha", fmt::format("{} outside [0, 1]", a));
        out.push_back(a);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", e.what());
    }
    if (!root.is_object()) throw ConfigError("<root>", "expected an object");

    ExperimentConfig cfg;
    if (find(root, "channels")) {
        cfg.channels = get_int(root, "channels", "channels");
        if (cfg.channels < 1) throw ConfigError("channels", "must be >= 1");
    }

    const json* traffic = find(root, "traffic");
    if (traffic == nullptr || !traffic->is_object()) throw ConfigError("traffic", "expected an object");
    if (find(*traffic, "lambda_n")) {
        cfg.traffic.lambda_n = get_number(*traffic, "lambda_n", "traffic.lambda_n");
        if (cfg.traffic.lambda_n < 0.0) throw ConfigError("traffic.lambda_n", "must be >= 0");
    }
    cfg.traffic.mu_a = rate_or_mean(*traffic, "mu_a", "call_mean_s");
    cfg.traffic.eta = rate_or_mean(*traffic, "eta", "dwell_mean_s");
    if (find(*traffic, "mu_override")) {
        cfg.traffic.mu_override =
            positive(get_number(*traffic, "mu_override", "traffic.mu_override"), "traffic.mu_override");
    }

    const json* policies = find(root, "policies");
    if (policies == nullptr || !policies->is_array() || policies->empty()) {
        throw ConfigError("policies", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < policies->size(); ++i) {
        cfg.policies.push_back(
            parse_policy((*policies)[i], cfg.channels, fmt::format("policies[{}]", i)));
    }

    if (const json* fb = find(root, "flow_balance")) {
        if (!fb->is_boolean()) throw ConfigError("flow_balance", "expected true or false");
        cfg.flow_balance = fb->get<bool>();
    }
    if (find(root, "lambda_h")) {
        cfg.lambda_h = get_number(root, "lambda_h", "lambda_h");
        if (cfg.lambda_h < 0.0) throw ConfigError("lambda_h", "must be >= 0");
    }

    if (const json* s = find(root, "sweep")) {
        if (!s->is_object()) throw ConfigError("sweep", "expected an object");
        cfg.sweep.start = get_number(*s, "start", "sweep.start");
        cfg.sweep.stop = get_number(*s, "stop", "sweep.stop");
        cfg.sweep.steps = get_int(*s, "steps", "sweep.steps");
        if (!(cfg.sweep.start > 0.0)) throw ConfigError("sweep.start", "must be > 0");
        if (cfg.sweep.stop < cfg.sweep.start) throw ConfigError("sweep.stop", "must be >= start");
        if (cfg.sweep.steps < 1) throw ConfigError("sweep.steps", "must be >= 1");
    }

    if (const json* g = find(root, "alpha_grid")) {
        if (!g->is_array() || g->empty()) throw ConfigError("alpha_grid", "expected a nonempty array");
        cfg.alpha_grid.clear();
        for (std::size_t i = 0; i < g->size(); ++i) {
            const std::string path = fmt::format("alpha_grid[{}]", i);
            if (!(*g)[i].is_number()) throw ConfigError(path, "expected a number");
            const double a = (*g)[i].get<double>();
            if (!(a >= 0.0 && a <= 1.0)) throw ConfigError(path, "must lie in [0, 1]");
            cfg.alpha_grid.push_back(a);
        }
    }

    if (const json* fp = find(root, "fixed_point")) {
        if (!fp->is_object()) throw ConfigError("fixed_point", "expected an object");
        if (find(*fp, "damping")) {
            cfg.fixed_point.damping = get_number(*fp, "damping", "fixed_point.damping");
            if (!(cfg.fixed_point.damping > 0.0 && cfg.fixed_point.damping <= 1.0)) {
                throw ConfigError("fixed_point.damping", "must lie in (0, 1]");
            }
        }
        if (find(*fp, "max_iterations")) {
            cfg.fixed_point.max_iterations =
                get_int(*fp, "max_iterations", "fixed_point.max_iterations");
            if (cfg.fixed_point.max_iterations < 1) {
                throw ConfigError("fixed_point.max_iterations", "must be >= 1");
            }
        }
    }

    if (const json* s = find(root, "simulate")) cfg.simulate = parse_sim(*s);

    if (const json* out = find(root, "output")) {
        if (!out->is_object()) throw ConfigError("output", "expected an object");
        if (const json* v = find(*out, "csv")) {
            if (!v->is_string()) throw ConfigError("output.csv", "expected a string");
            cfg.csv_path = v->get<std::string>();
        }
        if (const json* v = find(*out, "chart")) {
            if (!v->is_string()) throw ConfigError("output.chart", "expected a string");
            cfg.chart_path = v->get<std::string>();
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", fmt::format("cannot open '{}'", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

ExperimentConfig paper_preset() {
    ExperimentConfig cfg;
    cfg.channels = 130;
    cfg.traffic = TrafficParams{1.0, 1.0 / 120.0, 1.0 / 360.0, std::nullopt};
    cfg.policies = {AdmissionPolicy::new_call_bounding(130, 100),
                    AdmissionPolicy::acceptance_guard(130, 100, 110, 0.5)};
    cfg.flow_balance = true;
    cfg.sweep = LambdaRange{0.2, 3.0, 30};
    cfg.alpha_grid = default_alpha_grid();
    return cfg;
}

std::filesystem::path resolve_config_path(const std::string& arg) {
    namespace fs = std::filesystem;
    const char* dir = std::getenv(kConfigDirEnv);
    if (arg.empty()) {
        if (dir == nullptr) {
            throw ConfigError("--config", fmt::format("not given and {} is unset", kConfigDirEnv));
        }
        return fs::path(dir) / "paper.json";
    }
    fs::path p(arg);
    if (fs::exists(p) || p.is_absolute() || dir == nullptr) return p;
    return fs::path(dir) / p;
}

}  // namespace cac
