#include "fsonet/weather.hpp"

#include "support/oracles.hpp"
#include "support/test_util.hpp"

#include <doctest.h>

#include <fmt/format.h>

#include <random>

using namespace fsonet;
using fsonet::testing::error_code_of;

namespace {

UtcTime at(const char* iso) { return parse_iso8601(iso); }

weather::WeatherSeries series_of(std::initializer_list<std::pair<const char*, double>> pts) {
    weather::WeatherSeries s;
    s.station_id = "s";
    for (const auto& [t, v] : pts) {
        s.samples.push_back({at(t), v, std::nullopt});
    }
    return s;
}

weather::GridSeries gradient_grid(double origin_lat, double origin_lon, double cell, std::size_t rows,
                                  std::size_t cols) {
    weather::GridSeries g;
    g.layout = {origin_lat, origin_lon, cell, rows, cols};
    weather::GridFrame f;
    f.time = at("2023-06-01T00:00:00Z");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            f.values.push_back(static_cast<double>((r * 7 + c * 3) % 11) / 10.0);
        }
    }
    g.frames.push_back(std::move(f));
    return g;
}

}  // namespace

TEST_CASE("grid interchange parsing") {
    const auto g = weather::parse_grid_series("GRID 40 0 0.5 2 3\nFRAME 2023-06-01T00:00:00Z\n0 0 0\n0\t0  0\n");
    CHECK(g.layout.n_rows == 2);
    CHECK(g.layout.n_cols == 3);
    REQUIRE(g.frames.size() == 1);
    for (double v : g.frames[0].values) {
        CHECK(v == 0.0);
    }

    CHECK(error_code_of([] {
              weather::parse_grid_series(
                  "GRID 0 0 1 1 1\nFRAME 2023-06-01T00:15:00Z\n0\nFRAME 2023-06-01T00:00:00Z\n0\n");
          }) == ErrorCode::TimeOrderError);
    CHECK(error_code_of([] { weather::parse_grid_series("GRID 0 0 1 1\nFRAME 2023-06-01T00:00:00Z\n0\n"); }) ==
          ErrorCode::SchemaError);
    CHECK(error_code_of([] { weather::parse_grid_series("GRID 0 0 1 1 2\nFRAME 2023-06-01T00:00:00Z\n0\n"); }) ==
          ErrorCode::SchemaError);
    CHECK(error_code_of([] { weather::parse_grid_series("GRID 0 0 1 1 1\nFRAME 2023-06-01T00:00:00Z\n1.5\n"); }) ==
          ErrorCode::ValueError);
    CHECK(error_code_of([] { weather::parse_grid_series("GRID 0 0 1 1 1\nFRAME yesterday\n0\n"); }) ==
          ErrorCode::SchemaError);
    CHECK(error_code_of([] { weather::load_grid_series("/nonexistent/grid.txt"); }) == ErrorCode::IoError);
}

TEST_CASE("grid round trip through the interchange format") {
    auto g = gradient_grid(35.0, -10.0, 0.1, 4, 5);
    weather::GridFrame f2 = g.frames[0];
    f2.time = at("2023-06-01T00:15:00Z");
    f2.values[3] = 2.0;
    g.frames.push_back(f2);
    const auto back = weather::parse_grid_series(weather::format_grid_series(g));
    CHECK(back.layout.origin_lat == g.layout.origin_lat);
    CHECK(back.layout.cell_size == g.layout.cell_size);
    REQUIRE(back.frames.size() == 2);
    CHECK(back.frames[1].time == g.frames[1].time);
    CHECK(back.frames[1].values == g.frames[1].values);
}

TEST_CASE("whole-grid average of a binary mask") {
    const auto g = weather::parse_grid_series("GRID 0 0 1 2 2\nFRAME 2023-06-01T00:00:00Z\n0 2\n2 2\n");
    const auto s = weather::station_cloud_series(g, {1.0, 1.0, 0.0}, 300.0);
    REQUIRE(s.samples.size() == 1);
    CHECK(s.samples[0].cloud_fraction == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("uniform cloud and single-cell selection") {
    auto cloudy = gradient_grid(40.0, 0.0, 0.1, 20, 20);
    std::fill(cloudy.frames[0].values.begin(), cloudy.frames[0].values.end(), 2.0);
    for (double box : {1.0, 5.0, 20.0, 60.0}) {
        CHECK(weather::station_cloud_series(cloudy, {41.05, 1.05, 0.0}, box).samples[0].cloud_fraction == 1.0);
    }

    auto checker = cloudy;
    for (std::size_t r = 0; r < 20; ++r) {
        for (std::size_t c = 0; c < 20; ++c) {
            checker.frames[0].values[r * 20 + c] = (r + c) % 2 == 0 ? 0.0 : 2.0;
        }
    }
    // Cell (10, 10) is clear; its center is (41.05, 1.05).
    const auto s = weather::station_cloud_series(checker, {41.05, 1.05, 0.0}, 1.0);
    CHECK(s.samples[0].cloud_fraction == 0.0);
    CHECK(weather::cells_in_box(checker.layout, {41.05, 1.05, 0.0}, 1.0).size() == 1);
}

TEST_CASE("box selection matches brute-force cell enumeration") {
    const auto g = gradient_grid(30.0, -20.0, 0.027, 600, 1200);
    const oracles::Grid og{30.0, -20.0, 0.027, 600, 1200};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(32.0, 44.0), lon(-15.0, 10.0);
    for (int i = 0; i < 40; ++i) {
        const orbit::GeodeticSite site{lat(rng), lon(rng), 0.0};
        const auto cells = weather::cells_in_box(g.layout, site, 20.0);
        const auto ref = oracles::box_cells(og, site.latitude, site.longitude, 20.0);
        REQUIRE(cells == ref);
        double sum = 0.0;
        for (std::size_t k : ref) {
            sum += g.frames[0].values[k];
        }
        const auto s = weather::station_cloud_series(g, site, 20.0);
        CHECK(s.samples[0].cloud_fraction == doctest::Approx(sum / static_cast<double>(ref.size())).epsilon(1e-14));
    }
}

TEST_CASE("binary masks give fractions over the cell count") {
    auto g = gradient_grid(45.0, 5.0, 0.03, 100, 100);
    std::mt19937_64 rng(11);
    for (auto& v : g.frames[0].values) {
        v = (rng() & 1U) ? 2.0 : 0.0;
    }
    const orbit::GeodeticSite site{46.5, 6.5, 0.0};
    const auto n = static_cast<double>(weather::cells_in_box(g.layout, site, 20.0).size());
    const double f = weather::station_cloud_series(g, site, 20.0).samples[0].cloud_fraction;
    const double k = f * n;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
}

TEST_CASE("translating grid and site together leaves the series unchanged") {
    const auto g = gradient_grid(40.0, 0.0, 0.05, 60, 60);
    auto moved = g;
    moved.layout.origin_lon += 7.0;
    const orbit::GeodeticSite site{41.3, 1.4, 0.0};
    const orbit::GeodeticSite site_moved{41.3, 8.4, 0.0};
    const auto a = weather::station_cloud_series(g, site, 20.0);
    const auto b = weather::station_cloud_series(moved, site_moved, 20.0);
    CHECK(a.samples[0].cloud_fraction == doctest::Approx(b.samples[0].cloud_fraction).epsilon(1e-15));
}

TEST_CASE("coverage errors") {
    const auto g = gradient_grid(40.0, 0.0, 0.1, 10, 10);
    CHECK(error_code_of([&] { weather::station_cloud_series(g, {10.0, 0.5, 0.0}, 5.0); }) ==
          ErrorCode::OutOfCoverage);
    // A box hanging over the edge keeps only the cells inside the grid.
    const oracles::Grid og{40.0, 0.0, 0.1, 10, 10};
    CHECK(weather::cells_in_box(g.layout, {40.02, 0.5, 0.0}, 20.0) == oracles::box_cells(og, 40.02, 0.5, 20.0));
    CHECK(error_code_of([&] { weather::station_cloud_series(g, {40.5, 0.5, 0.0}, 0.0); }) ==
          ErrorCode::DomainError);
}

TEST_CASE("turbulence lookup") {
    const auto map = weather::parse_turbulence_map("GRID 0 0 1 2 2\nFRAME 2023-01-01T00:00:00Z\n1e-17 2e-17\n3e-17 4e-17\n");
    CHECK(weather::station_turbulence(map, {0.5, 1.5, 0.0}) == 2e-17);
    CHECK(weather::station_turbulence(map, {1.5, 0.5, 0.0}) == 3e-17);
    // Boundaries: lower row, then lower column.
    CHECK(weather::station_turbulence(map, {1.0, 0.5, 0.0}) == 1e-17);
    CHECK(weather::station_turbulence(map, {1.5, 1.0, 0.0}) == 3e-17);
    CHECK(weather::station_turbulence(map, {1.0, 1.0, 0.0}) == 1e-17);
    CHECK(error_code_of([&] { weather::station_turbulence(map, {5.0, 0.5, 0.0}); }) == ErrorCode::OutOfCoverage);
    CHECK(error_code_of([] {
              weather::parse_turbulence_map("GRID 0 0 1 1 1\nFRAME 2023-01-01T00:00:00Z\n0\n");
          }) == ErrorCode::ValueError);

    weather::TurbulenceMap big;
    big.layout = {30.0, -20.0, 0.25, 80, 160};
    for (std::size_t i = 0; i < 80 * 160; ++i) {
        big.values.push_back(1e-18 * static_cast<double>(i + 1));
    }
    const oracles::Grid og{30.0, -20.0, 0.25, 80, 160};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(30.0, 50.0), lon(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
        const double la = lat(rng), lo = lon(rng);
        CHECK(weather::station_turbulence(big, {la, lo, 0.0}) == big.values[oracles::nearest_cell(og, la, lo)]);
    }
}

TEST_CASE("step-hold lookup and cloud-free line of sight") {
    const auto s = series_of({{"2023-06-01T00:00:00Z", 0.0}, {"2023-06-01T00:15:00Z", 0.1}, {"2023-06-01T00:30:00Z", 0.5}});
    CHECK(weather::cflos(s, at("2023-06-01T00:00:00Z"), 0.1));
    CHECK_FALSE(weather::cflos(s, at("2023-06-01T00:15:00Z"), 0.1));
    CHECK(weather::cflos(s, at("2023-06-01T00:14:59Z"), 0.1));
    CHECK(s.cloud_fraction_at(at("2023-06-01T00:22:00Z")) == 0.1);
    CHECK(s.cloud_fraction_at(at("2023-06-01T00:30:00Z")) == 0.5);
    CHECK(error_code_of([&] { weather::cflos(s, at("2023-06-01T00:30:01Z"), 0.1); }) == ErrorCode::OutOfSpan);
    CHECK(error_code_of([&] { weather::cflos(s, at("2023-05-31T23:59:59Z"), 0.1); }) == ErrorCode::OutOfSpan);

    for (const double f : {0.0, 0.05, 0.1, 0.3, 0.9, 1.0}) {
        const auto one = series_of({{"2023-06-01T00:00:00Z", f}});
        bool prev = false;
        for (double th = 0.0; th <= 1.0001; th += 0.05) {
            const bool now = weather::cflos(one, one.first(), th);
            CHECK((!prev || now));
            prev = now;
        }
    }
}

TEST_CASE("series validation") {
    auto bad = series_of({{"2023-06-01T00:00:00Z", 1.2}});
    CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::ValueError);
    auto order = series_of({{"2023-06-01T00:15:00Z", 0.0}, {"2023-06-01T00:00:00Z", 0.0}});
    CHECK(error_code_of([&] { order.validate(); }) == ErrorCode::TimeOrderError);
    auto cn = series_of({{"2023-06-01T00:00:00Z", 0.0}});
    cn.samples[0].cn2 = 0.0;
    CHECK(error_code_of([&] { cn.validate(); }) == ErrorCode::ValueError);
    auto ok = series_of({{"2023-06-01T00:00:00Z", 0.2}});
    weather::attach_turbulence(ok, 3e-16);
    CHECK(*ok.samples[0].cn2 == 3e-16);
    CHECK_FALSE(error_code_of([&] { ok.validate(); }));
    CHECK(error_code_of([&] { weather::attach_turbulence(ok, -1.0); }) == ErrorCode::ValueError);
}

TEST_CASE("slicing to a window") {
    const auto s = series_of({{"2023-06-01T00:00:00Z", 0.0}, {"2023-06-01T00:15:00Z", 0.4}, {"2023-06-01T00:30:00Z", 0.8}});
    const auto w = weather::slice(s, {at("2023-06-01T00:10:00Z"), at("2023-06-01T00:20:00Z")});
    REQUIRE(w.samples.size() == 3);
    CHECK(w.first() == at("2023-06-01T00:10:00Z"));
    CHECK(w.samples[0].cloud_fraction == 0.0);
    CHECK(w.samples[1].cloud_fraction == 0.4);
    CHECK(w.last() == at("2023-06-01T00:20:00Z"));
    CHECK(w.samples[2].cloud_fraction == 0.4);

    const auto exact = weather::slice(s, {at("2023-06-01T00:00:00Z"), at("2023-06-01T00:30:00Z")});
    CHECK(exact.samples.size() == 3);
    CHECK(error_code_of([&] { weather::slice(s, {at("2023-06-01T00:10:00Z"), at("2023-06-01T00:31:00Z")}); }) ==
          ErrorCode::OutOfSpan);
    CHECK(error_code_of([&] { weather::slice(s, {at("2023-06-01T00:20:00Z"), at("2023-06-01T00:10:00Z")}); }) ==
          ErrorCode::InvalidWindow);
}

TEST_CASE("synthetic Bernoulli weather") {
    const TimeWindow span{at("2023-01-01T00:00:00Z"), at("2023-01-01T00:00:00Z") + Seconds{60 * 99'999}};
    const std::vector<double> p{0.0, 1.0, 0.3};
    const auto s = weather::synth_weather(p, span, Seconds{60}, 42);
    REQUIRE(s.size() == 3);
    REQUIRE(s[2].samples.size() == 100'000);
    CHECK(s[0].last() == span.end);
    double mean = 0.0;
    for (std::size_t i = 0; i < s[2].samples.size(); ++i) {
        CHECK(s[0].samples[i].cloud_fraction == 0.0);
        CHECK(s[1].samples[i].cloud_fraction == 1.0);
        const double v = s[2].samples[i].cloud_fraction;
        CHECK((v == 0.0 || v == 1.0));
        mean += v;
    }
    mean /= static_cast<double>(s[2].samples.size());
    CHECK(std::abs(mean - 0.3) < 0.01);

    const auto again = weather::synth_weather(p, span, Seconds{60}, 42);
    CHECK(again[2].samples.size() == s[2].samples.size());
    bool same = true;
    for (std::size_t i = 0; i < s[2].samples.size(); ++i) {
        same = same && again[2].samples[i].cloud_fraction == s[2].samples[i].cloud_fraction;
    }
    CHECK(same);

    const std::vector<double> bad{1.5};
    CHECK(error_code_of([&] { weather::synth_weather(bad, span, Seconds{60}, 1); }) == ErrorCode::DomainError);
    CHECK(error_code_of([&] { weather::synth_weather(p, span, Seconds{0}, 1); }) == ErrorCode::DomainError);
}

TEST_CASE("weather.csv layout") {
    auto a = series_of({{"2023-06-01T00:00:00Z", 0.25}, {"2023-06-01T00:15:00Z", 1.0}});
    auto b = a;
    a.station_id = "alpha";
    b.station_id = "beta";
    const auto dir = fsonet::testing::scratch_dir("weather_csv");
    const std::vector<weather::WeatherSeries> both{a, b};
    weather::write_weather_csv((dir / "weather.csv").string(), both);
    const auto text = fsonet::testing::slurp(dir / "weather.csv");
    CHECK(text.rfind("timestamp,alpha,beta\r\n2023-06-01T00:00:00Z,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
