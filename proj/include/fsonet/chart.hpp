#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fsonet::chart {

enum class ChartKind { Line, Bar, Scatter, Heatmap };

struct Series {
    std::string name;
    std::vector<double> x;  // scatter only
    std::vector<double> y;
};

struct ChartData {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> categories;  // line and bar x positions
    std::vector<Series> series;
    // Heatmap: square matrix over `categories`, row-major, absent cells grey.
    std::vector<std::optional<double>> matrix;
};

/// Self-contained SVG document. Throws Error(EmptySeries) when there is
/// nothing to draw.
std::string render_svg(const ChartData& data, ChartKind kind);

void render_chart(const ChartData& data, ChartKind kind, const std::string& path);

}  // namespace fsonet::chart
