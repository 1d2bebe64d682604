#include "cac/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <limits>

#include "cac/error.hpp"
#include "cac/sweep.hpp"

namespace cac {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 200;  // legend column
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                 "#bcbd22", "#17becf"};

struct Point {
    double x;
    double y;
};

std::string escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

double parse_field(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw DomainError(fmt::format("malformed CSV number '{}'", s));
    return v;
}

}  // namespace

std::vector<std::string> series_in(std::string_view csv_text) {
    const CsvData csv = parse_csv(csv_text);
    const auto c = csv.column("policy");
    if (!c) throw DomainError("malformed CSV: missing column 'policy'");
    std::vector<std::string> out;
    for (const auto& row : csv.rows) {
        if (std::find(out.begin(), out.end(), row[*c]) == out.end()) out.push_back(row[*c]);
    }
    return out;
}

std::string render_chart(std::string_view csv_text, const std::vector<std::string>& series,
                         const ChartOptions& options) {
    if (series.empty()) throw DomainError("empty series selection");
    const CsvData csv = parse_csv(csv_text);
    const auto cx = csv.column("lambda_n");
    const auto cp = csv.column("policy");
    const auto cy = csv.column(options.metric);
    if (!cx || !cp) throw DomainError("malformed CSV: needs lambda_n and policy columns");
    if (!cy) throw DomainError(fmt::format("unknown metric column '{}'", options.metric));

    std::vector<std::vector<Point>> lines(series.size());
    std::vector<bool> seen(series.size(), false);
    for (const auto& row : csv.rows) {
        const auto it = std::find(series.begin(), series.end(), row[*cp]);
        if (it == series.end()) continue;
        const auto k = static_cast<std::size_t>(it - series.begin());
        seen[k] = true;
        const double x = parse_field(row[*cx]);
        const double y = parse_field(row[*cy]);
        if (!std::isfinite(x) || !std::isfinite(y) || (options.log_y && y <= 0.0)) continue;
        lines[k].push_back({x, options.log_y ? std::log10(y) : y});
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (!seen[k]) throw DomainError(fmt::format("unknown series '{}'", series[k]));
    }

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& line : lines) {
        for (const auto& p : line) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    }
    if (options.log_y) {
        y0 = std::floor(y0);
        y1 = std::ceil(y1);
    }
    if (x1 - x0 <= 0.0) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 <= 0.0) y0 -= 0.5, y1 += 0.5;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
    auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * plot_h; };

    std::string svg = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    if (!options.title.empty()) {
        svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\">{}</text>\n", kLeft,
                           escape(options.title));
    }
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        kLeft, kTop, plot_w, plot_h);

    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double x = x0 + (x1 - x0) * t / kTicks;
        svg += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n"
            "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.3g}</text>\n",
            sx(x), kTop, kTop + plot_h, kTop + plot_h + 18, x);
    }
    const int y_ticks = options.log_y ? static_cast<int>(std::min(y1 - y0, 12.0)) : kTicks;
    for (int t = 0; t <= y_ticks; ++t) {
        const double y = y0 + (y1 - y0) * t / y_ticks;
        const std::string label =
            options.log_y ? fmt::format("1e{:.0f}", y) : fmt::format("{:.3g}", y);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
            "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
            kLeft, sy(y), kLeft + plot_w, kLeft - 6, sy(y) + 4, label);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">lambda_n (calls/s)</text>\n",
                       kLeft + plot_w / 2, kHeight - 18);
    svg += fmt::format(
        "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}{2}"
        "</text>\n",
        kTop + plot_h / 2, escape(options.metric), options.log_y ? " (log10)" : "");

    for (std::size_t k = 0; k < lines.size(); ++k) {
        const char* color = kPalette[k % kPalette.size()];
        const auto& line = lines[k];
        if (line.size() == 1) {
            svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                               sx(line[0].x), sy(line[0].y), color);
        } else if (line.size() > 1) {
            svg += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
            svg += color;
            svg += "\" points=\"";
            for (const auto& p : line) svg += fmt::format("{:.2f},{:.2f} ", sx(p.x), sy(p.y));
            svg += "\"/>\n";
        }
        const double ly = kTop + 12 + 18.0 * static_cast<double>(k);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
            "stroke-width=\"2\"/>\n<text x=\"{4}\" y=\"{5:.1f}\">{6}</text>\n",
            kLeft + plot_w + 12, ly, kLeft + plot_w + 32, color, kLeft + plot_w + 38, ly + 4,
            escape(series[k]));
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace cac
