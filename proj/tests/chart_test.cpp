#include "fsonet/chart.hpp"

#include "support/test_util.hpp"
#include "support/xml_check.hpp"

#include <doctest.h>

#include <fmt/format.h>

#include <regex>

using namespace fsonet;
using fsonet::testing::count_of;
using fsonet::testing::error_code_of;
using fsonet::testing::xml_problem;

namespace {

chart::ChartData months(std::size_t n) {
    chart::ChartData d;
    d.title = "Monthly";
    d.x_label = "Month";
    d.y_label = "Availability (%)";
    chart::Series s{"config1", {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        d.categories.push_back(fmt::format("2023-{:02d}", i + 1));
        s.y.push_back(50.0 + static_cast<double>(i));
    }
    d.series.push_back(s);
    return d;
}

chart::ChartData heatmap(std::size_t n) {
    chart::ChartData d;
    d.title = "Cloud correlation";
    for (std::size_t i = 0; i < n; ++i) {
        d.categories.push_back("s" + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == 2 || j == 2) {
                d.matrix.push_back(std::nullopt);
            } else {
                d.matrix.push_back(i == j ? 1.0 : -0.8 + 0.1 * static_cast<double>(i + j));
            }
        }
    }
    return d;
}

}  // namespace

TEST_CASE("single point line chart") {
    const auto svg = chart::render_svg(months(1), chart::ChartKind::Line);
    CHECK(xml_problem(svg).empty());
    CHECK(count_of(svg, "<polyline") == 1);
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("<polyline[^>]*points=\"([^\"]*)\"")));
    const std::string pts = m[1];
    CHECK(count_of(pts, ",") == 1);
}

TEST_CASE("twelve month bar chart") {
    auto d = months(12);
    const auto svg = chart::render_svg(d, chart::ChartKind::Bar);
    CHECK(xml_problem(svg).empty());
    CHECK(count_of(svg, "<rect") == 12);
    CHECK(svg.find("Availability (%)") != std::string::npos);
    CHECK(svg.find("Month") != std::string::npos);

    d.series.push_back({"config2", {}, d.series[0].y});
    CHECK(count_of(chart::render_svg(d, chart::ChartKind::Bar), "<rect") == 24);
}

TEST_CASE("correlation heatmap") {
    const auto svg = chart::render_svg(heatmap(7), chart::ChartKind::Heatmap);
    CHECK(xml_problem(svg).empty());
    CHECK(count_of(svg, "class=\"cell\"") == 49);
    CHECK(count_of(svg, "<stop") == 3);
    CHECK(svg.find("<linearGradient id=\"scale\"") != std::string::npos);
    CHECK(count_of(svg, "class=\"scale\"") == 1);
    // Absent cells: row 2 and column 2.
    CHECK(count_of(svg, "#bdbdbd") >= 13);
    CHECK(svg.find(">-1<") != std::string::npos);
    CHECK(svg.find(">1<") != std::string::npos);
}

TEST_CASE("scatter chart") {
    chart::ChartData d;
    d.title = "Availability vs data";
    d.x_label = "A (%)";
    d.y_label = "T (Gbit)";
    d.series.push_back({"configs", {80.0, 93.6, 98.0, 99.0}, {2.9e5, 6.6e5, 8.7e5, 9.7e5}});
    const auto svg = chart::render_svg(d, chart::ChartKind::Scatter);
    CHECK(xml_problem(svg).empty());
    CHECK(count_of(svg, "class=\"point\"") == 4);
}

TEST_CASE("documents are self-contained, escaped and deterministic") {
    auto d = months(3);
    d.title = "R&D <north> \"sites\"";
    d.series[0].name = "a<b";
    for (auto kind : {chart::ChartKind::Line, chart::ChartKind::Bar}) {
        const auto a = chart::render_svg(d, kind);
        const auto b = chart::render_svg(d, kind);
        CHECK(a == b);
        CHECK(xml_problem(a).empty());
        CHECK(a.find("R&amp;D &lt;north&gt;") != std::string::npos);
        CHECK(a.find("href") == std::string::npos);
        CHECK(a.find("<image") == std::string::npos);
        CHECK(count_of(a, "http") == count_of(a, "xmlns=\"http://www.w3.org/2000/svg\""));
    }
}

TEST_CASE("chart errors") {
    chart::ChartData empty;
    CHECK(error_code_of([&] { chart::render_svg(empty, chart::ChartKind::Line); }) == ErrorCode::EmptySeries);
    CHECK(error_code_of([&] { chart::render_svg(empty, chart::ChartKind::Bar); }) == ErrorCode::EmptySeries);
    CHECK(error_code_of([&] { chart::render_svg(empty, chart::ChartKind::Heatmap); }) == ErrorCode::EmptySeries);
    auto d = months(3);
    d.series[0].y.push_back(1.0);
    CHECK(error_code_of([&] { chart::render_svg(d, chart::ChartKind::Line); }) == ErrorCode::InvariantViolation);
    CHECK(error_code_of([&] { chart::render_svg(d, chart::ChartKind::Bar); }) == ErrorCode::InvariantViolation);
    auto h = heatmap(3);
    h.matrix.pop_back();
    CHECK(error_code_of([&] { chart::render_svg(h, chart::ChartKind::Heatmap); }) ==
          ErrorCode::InvariantViolation);
}

TEST_CASE("charts land on disk") {
    const auto dir = fsonet::testing::scratch_dir("chart");
    const auto path = (dir / "bar.svg").string();
    chart::render_chart(months(4), chart::ChartKind::Bar, path);
    CHECK(fsonet::testing::slurp(path) == chart::render_svg(months(4), chart::ChartKind::Bar));
    CHECK(error_code_of([] { chart::render_chart(months(1), chart::ChartKind::Bar, "/nonexistent/dir/x.svg"); }) ==
          ErrorCode::IoError);
}

TEST_CASE("the well-formedness checker rejects broken documents") {
    CHECK_FALSE(xml_problem("<svg><g></svg>").empty());
    CHECK_FALSE(xml_problem("<svg a=1/>").empty());
    CHECK_FALSE(xml_problem("<svg>&bogus;</svg>").empty());
    CHECK_FALSE(xml_problem("<a/><b/>").empty());
    CHECK(xml_problem("<?xml version=\"1.0\"?>\n<svg x=\"1\"><g/><!-- c --></svg>\n").empty());
}
