#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cac {

struct ChartOptions {
    std::string metric = "p_block";  ///< y column
    bool log_y = false;
    std::string title;
};

/// Renders one polyline per selected policy label of a sweep CSV as a
/// standalone SVG document. x is lambda_n. Throws DomainError on an empty
/// selection, an unknown series or metric, or malformed CSV.
std::string render_chart(std::string_view csv_text, const std::vector<std::string>& series,
                         const ChartOptions& options = {});

/// Policy labels in first-appearance order.
std::vector<std::string> series_in(std::string_view csv_text);

}  // namespace cac
