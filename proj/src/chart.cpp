#include "fsonet/chart.hpp"

#include "fsonet/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace fsonet::chart {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 80.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::string s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;
    int decimals = 1;

    double map(double v, double from, double length) const { return from + (v - lo) / (hi - lo) * length; }
};

Axis nice_axis(double lo, double hi, bool from_zero) {
    if (from_zero) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    if (hi - lo <= 0.0) {
        const double pad = std::abs(hi) > 0.0 ? std::abs(hi) * 0.1 : 1.0;
        lo = from_zero && lo >= 0.0 ? lo : lo - pad;
        hi += pad;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    Axis a;
    a.step = step;
    a.lo = std::floor(lo / step + 1e-9) * step;
    a.hi = std::ceil(hi / step - 1e-9) * step;
    if (a.hi <= a.lo) {
        a.hi = a.lo + step;
    }
    a.decimals = 0;
    while (a.decimals < 8) {
        const double scaled = step * std::pow(10.0, a.decimals);
        if (std::abs(scaled - std::round(scaled)) < 1e-6) {
            break;
        }
        ++a.decimals;
    }
    return a;
}

std::string tick_label(double v, int decimals) {
    std::string s = fmt::format("{:.{}f}", v, decimals);
    if (s.find_first_not_of("-0.") == std::string::npos) {
        s = fmt::format("{:.{}f}", 0.0, decimals);
    }
    return s;
}

class Svg {
public:
    explicit Svg(const ChartData& data) {
        out_ += fmt::format(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
            "font-family=\"sans-serif\" font-size=\"12\">\n",
            kWidth, kHeight);
        out_ += fmt::format("<title>{}</title>\n", xml_escape(data.title));
        text(kWidth / 2.0, 28.0, data.title, "middle", "font-size=\"16\"");
    }

    void raw(const std::string& s) { out_ += s; }

    void text(double x, double y, std::string_view s, std::string_view anchor, std::string_view extra = {}) {
        out_ += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"{}\"{}{}>{}</text>\n", num(x), num(y), anchor,
                            extra.empty() ? "" : " ", extra, xml_escape(s));
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
        out_ += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                            num(x1), num(y1), num(x2), num(y2), stroke, num(width));
    }

    std::string finish() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    std::string out_;
};

void y_axis(Svg& svg, const Axis& a, const std::string& label) {
    svg.line(kLeft, kTop, kLeft, kTop + kPlotH, "#000000");
    const int n = static_cast<int>(std::lround((a.hi - a.lo) / a.step));
    for (int i = 0; i <= n; ++i) {
        const double v = a.lo + i * a.step;
        const double y = a.map(v, kTop + kPlotH, -kPlotH);
        svg.line(kLeft - 5.0, y, kLeft, y, "#000000");
        svg.line(kLeft, y, kLeft + kPlotW, y, "#dddddd", 0.5);
        svg.text(kLeft - 8.0, y + 4.0, tick_label(v, a.decimals), "end");
    }
    const double cy = kTop + kPlotH / 2.0;
    svg.text(20.0, cy, label, "middle", fmt::format("transform=\"rotate(-90 20 {})\"", num(cy)));
}

void x_axis_line(Svg& svg, const std::string& label) {
    svg.line(kLeft, kTop + kPlotH, kLeft + kPlotW, kTop + kPlotH, "#000000");
    svg.text(kLeft + kPlotW / 2.0, kHeight - 12.0, label, "middle");
}

void category_labels(Svg& svg, const std::vector<std::string>& categories) {
    const double slot = kPlotW / static_cast<double>(categories.size());
    const bool rotate = categories.size() > 6;
    for (std::size_t k = 0; k < categories.size(); ++k) {
        const double x = kLeft + (static_cast<double>(k) + 0.5) * slot;
        const double y = kTop + kPlotH + 16.0;
        if (rotate) {
            svg.text(x, y, categories[k], "end",
                     fmt::format("transform=\"rotate(-45 {} {})\"", num(x), num(y)));
        } else {
            svg.text(x, y, categories[k], "middle");
        }
    }
}

void legend(Svg& svg, const std::vector<Series>& series) {
    const double x = kLeft + kPlotW + 20.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = kTop + 10.0 + 18.0 * static_cast<double>(i);
        svg.line(x, y, x + 18.0, y, kPalette[i % kPalette.size()], 3.0);
        svg.text(x + 24.0, y + 4.0, series[i].name, "start");
    }
}

void require_points(const ChartData& data) {
    const bool any = std::any_of(data.series.begin(), data.series.end(), [](const Series& s) { return !s.y.empty(); });
    if (!any) {
        throw Error(ErrorCode::EmptySeries, fmt::format("chart '{}' has no data points", data.title));
    }
}

std::pair<double, double> value_range(const std::vector<Series>& series, bool use_x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        for (double v : use_x ? s.x : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

std::string line_chart(const ChartData& data) {
    require_points(data);
    std::size_t n = data.categories.size();
    for (const auto& s : data.series) {
        if (s.y.size() > n) {
            throw Error(ErrorCode::InvariantViolation, fmt::format("series '{}' longer than the category axis", s.name));
        }
    }
    const auto [lo, hi] = value_range(data.series, false);
    const Axis a = nice_axis(lo, hi, false);
    Svg svg(data);
    y_axis(svg, a, data.y_label);
    x_axis_line(svg, data.x_label);
    category_labels(svg, data.categories);
    const double slot = kPlotW / static_cast<double>(n);
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const Series& s = data.series[i];
        if (s.y.empty()) {
            continue;
        }
        std::string points;
        for (std::size_t k = 0; k < s.y.size(); ++k) {
            if (!points.empty()) {
                points += ' ';
            }
            points += num(kLeft + (static_cast<double>(k) + 0.5) * slot) + ',' + num(a.map(s.y[k], kTop + kPlotH, -kPlotH));
        }
        svg.raw(fmt::format("<polyline class=\"series\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                            kPalette[i % kPalette.size()], points));
    }
    legend(svg, data.series);
    return svg.finish();
}

std::string bar_chart(const ChartData& data) {
    require_points(data);
    const std::size_t n = data.categories.size();
    for (const auto& s : data.series) {
        if (s.y.size() != n) {
            throw Error(ErrorCode::InvariantViolation, fmt::format("series '{}' does not match the categories", s.name));
        }
    }
    const auto [lo, hi] = value_range(data.series, false);
    const Axis a = nice_axis(lo, hi, true);
    Svg svg(data);
    y_axis(svg, a, data.y_label);
    x_axis_line(svg, data.x_label);
    category_labels(svg, data.categories);
    const double slot = kPlotW / static_cast<double>(n);
    const double group = slot * 0.7;
    const double width = group / static_cast<double>(data.series.size());
    const double zero = a.map(0.0, kTop + kPlotH, -kPlotH);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < data.series.size(); ++i) {
            const double v = data.series[i].y[k];
            const double y = a.map(v, kTop + kPlotH, -kPlotH);
            const double x = kLeft + static_cast<double>(k) * slot + (slot - group) / 2.0 + static_cast<double>(i) * width;
            svg.raw(fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{}</title></rect>\n",
                                num(x), num(std::min(y, zero)), num(width), num(std::abs(zero - y)),
                                kPalette[i % kPalette.size()], xml_escape(fmt::format("{}: {}", data.categories[k], v))));
        }
    }
    if (data.series.size() > 1) {
        legend(svg, data.series);
    }
    return svg.finish();
}

std::string scatter_chart(const ChartData& data) {
    require_points(data);
    for (const auto& s : data.series) {
        if (s.x.size() != s.y.size()) {
            throw Error(ErrorCode::InvariantViolation, fmt::format("series '{}' has unequal x and y", s.name));
        }
    }
    const auto [xlo, xhi] = value_range(data.series, true);
    const auto [ylo, yhi] = value_range(data.series, false);
    const Axis ax = nice_axis(xlo, xhi, false);
    const Axis ay = nice_axis(ylo, yhi, false);
    Svg svg(data);
    y_axis(svg, ay, data.y_label);
    x_axis_line(svg, data.x_label);
    const int n = static_cast<int>(std::lround((ax.hi - ax.lo) / ax.step));
    for (int i = 0; i <= n; ++i) {
        const double v = ax.lo + i * ax.step;
        const double x = ax.map(v, kLeft, kPlotW);
        svg.line(x, kTop + kPlotH, x, kTop + kPlotH + 5.0, "#000000");
        svg.text(x, kTop + kPlotH + 18.0, tick_label(v, ax.decimals), "middle");
    }
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const Series& s = data.series[i];
        for (std::size_t k = 0; k < s.y.size(); ++k) {
            svg.raw(fmt::format("<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{}\"/>\n",
                                num(ax.map(s.x[k], kLeft, kPlotW)), num(ay.map(s.y[k], kTop + kPlotH, -kPlotH)),
                                kPalette[i % kPalette.size()]));
        }
    }
    legend(svg, data.series);
    return svg.finish();
}

struct Rgb {
    double r, g, b;
};

std::string diverging(double v) {
    constexpr Rgb neg{49, 54, 149};
    constexpr Rgb mid{247, 247, 247};
    constexpr Rgb pos{165, 0, 38};
    const double t = std::clamp(v, -1.0, 1.0);
    const Rgb& end = t < 0.0 ? neg : pos;
    const double f = std::abs(t);
    const auto mix = [f](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
    return fmt::format("#{:02x}{:02x}{:02x}", mix(mid.r, end.r), mix(mid.g, end.g), mix(mid.b, end.b));
}

std::string heatmap(const ChartData& data) {
    const std::size_t n = data.categories.size();
    if (n == 0 || data.matrix.empty()) {
        throw Error(ErrorCode::EmptySeries, fmt::format("heatmap '{}' has no cells", data.title));
    }
    if (data.matrix.size() != n * n) {
        throw Error(ErrorCode::InvariantViolation, "heatmap matrix is not square over its labels");
    }
    Svg svg(data);
    const double side = std::min(kPlotW, kPlotH) / static_cast<double>(n);
    const double left = kLeft + 40.0;
    svg.raw("<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
            "<stop offset=\"0\" stop-color=\"" + diverging(-1.0) + "\"/>"
            "<stop offset=\"0.5\" stop-color=\"" + diverging(0.0) + "\"/>"
            "<stop offset=\"1\" stop-color=\"" + diverging(1.0) + "\"/>"
            "</linearGradient></defs>\n");
    for (std::size_t i = 0; i < n; ++i) {
        const double y = kTop + static_cast<double>(i) * side;
        svg.text(left - 6.0, y + side / 2.0 + 4.0, data.categories[i], "end");
        for (std::size_t j = 0; j < n; ++j) {
            const double x = left + static_cast<double>(j) * side;
            const auto& v = data.matrix[i * n + j];
            svg.raw(fmt::format("<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                                num(x), num(y), num(side), num(side), v ? diverging(*v) : "#bdbdbd"));
            svg.text(x + side / 2.0, y + side / 2.0 + 4.0, v ? fmt::format("{:.2f}", *v) : "n/a", "middle",
                     "font-size=\"10\"");
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double x = left + (static_cast<double>(j) + 0.5) * side;
        const double y = kTop + static_cast<double>(n) * side + 14.0;
        svg.text(x, y, data.categories[j], "end", fmt::format("transform=\"rotate(-45 {} {})\"", num(x), num(y)));
    }
    const double sx = left + static_cast<double>(n) * side + 30.0;
    const double sh = static_cast<double>(n) * side;
    svg.raw(fmt::format("<rect class=\"scale\" x=\"{}\" y=\"{}\" width=\"16\" height=\"{}\" fill=\"url(#scale)\"/>\n",
                        num(sx), num(kTop), num(sh)));
    svg.text(sx + 22.0, kTop + 4.0, "1", "start");
    svg.text(sx + 22.0, kTop + sh / 2.0 + 4.0, "0", "start");
    svg.text(sx + 22.0, kTop + sh + 4.0, "-1", "start");
    if (!data.y_label.empty()) {
        svg.text(sx + 8.0, kTop + sh + 24.0, data.y_label, "middle");
    }
    return svg.finish();
}

}  // namespace

std::string render_svg(const ChartData& data, ChartKind kind) {
    switch (kind) {
        case ChartKind::Line: return line_chart(data);
        case ChartKind::Bar: return bar_chart(data);
        case ChartKind::Scatter: return scatter_chart(data);
        case ChartKind::Heatmap: return heatmap(data);
    }
    throw Error(ErrorCode::InvariantViolation, "unknown chart kind");
}

void render_chart(const ChartData& data, ChartKind kind, const std::string& path) {
    const std::string svg = render_svg(data, kind);
    std::ofstream out(path, std::ios::binary);
    out << svg;
    if (!out) {
        throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    }
}

}  // namespace fsonet::chart
