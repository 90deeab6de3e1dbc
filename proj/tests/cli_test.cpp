#include "fsonet/cli.hpp"

#include "support/test_util.hpp"
#include "support/xml_check.hpp"

#include <doctest.h>

#include <sstream>

using namespace fsonet;
namespace fs = std::filesystem;
using fsonet::testing::fixture_path;
using fsonet::testing::slurp;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fsonet");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

/// Rows of an RFC 4180 document; throws on malformed quoting or bare LF.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty()) {
                throw std::runtime_error("quote inside an unquoted field");
            }
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            ++i;
        } else if (c == '\n' || c == '\r') {
            throw std::runtime_error("bare line break");
        } else {
            field += c;
        }
    }
    if (quoted || !field.empty() || !row.empty()) {
        throw std::runtime_error("unterminated last record");
    }
    return rows;
}

void check_tree(const fs::path& dir) {
    std::size_t csvs = 0, svgs = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) {
            continue;
        }
        const auto text = slurp(e.path());
        if (e.path().extension() == ".csv") {
            ++csvs;
            INFO(e.path().string());
            std::vector<std::vector<std::string>> rows;
            REQUIRE_NOTHROW(rows = parse_csv(text));
            REQUIRE_FALSE(rows.empty());
            for (const auto& r : rows) {
                CHECK(r.size() == rows.front().size());
            }
        } else if (e.path().extension() == ".svg") {
            ++svgs;
            INFO(e.path().string());
            CHECK(fsonet::testing::xml_problem(text).empty());
        }
    }
    CHECK(csvs > 0);
    (void)svgs;
}

std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files.emplace_back(fs::relative(e.path(), dir).string(), slurp(e.path()));
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    const auto missing = run_cli({"passes"});
    CHECK(missing.code == cli::kExitUsage);
    CHECK(missing.err.find("--scenario") != std::string::npos);
    CHECK(run_cli({"passes", "--scenario", "/nonexistent.cfg"}).code == cli::kExitUsage);
    CHECK(run_cli({"passes", "--scenario", fixture_path("mini.cfg").string(), "--seed", "x"}).code ==
          cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("data errors exit with code 2") {
    const auto dir = fsonet::testing::scratch_dir("cli_errors");
    const auto span = run_cli({"availability", "--scenario", fixture_path("short_weather.cfg").string(), "--out",
                               dir.string()});
    CHECK(span.code == cli::kExitData);
    CHECK(span.err.find("SpanMismatch") != std::string::npos);

    const auto bad_set = run_cli({"passes", "--scenario", fixture_path("mini.cfg").string(), "--out", dir.string(),
                                  "--set", "simulation.bogus=1"});
    CHECK(bad_set.code == cli::kExitData);
    CHECK(bad_set.err.find("ConfigError") != std::string::npos);

    const auto bad_config = run_cli({"throughput", "--scenario", fixture_path("mini.cfg").string(), "--out",
                                     dir.string(), "--config", "nope"});
    CHECK(bad_config.code == cli::kExitData);
}

TEST_CASE("sweep on the bundled scenario, shortened to one month") {
    const auto dir = fsonet::testing::scratch_dir("cli_sweep");
    const auto r = run_cli({"sweep", "--scenario", fsonet::testing::data_path("terrasarx_europe.cfg").string(),
                            "--set", "simulation.end=2023-07-01T00:00:00Z", "--out", dir.string()});
    REQUIRE(r.code == cli::kExitOk);
    const auto rows = parse_csv(slurp(dir / "summary.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"configuration", "A_overall_pct", "T_gbits", "pdt_pct", "outage_pct"});
    CHECK(rows[1][0] == "config1");
    CHECK(rows[4][0] == "config4");
    for (const char* chart : {"availability_monthly.svg", "throughput_monthly.svg", "pdt.svg",
                              "availability_vs_data.svg", "correlation.svg"}) {
        CHECK(fs::exists(dir / chart));
    }
    CHECK(fs::exists(dir / "correlation.csv"));
    for (const char* c : {"config1", "config4"}) {
        for (const char* f : {"availability_monthly.csv", "station_availability.csv", "throughput_monthly.csv",
                              "per_pass.csv", "buffer.csv", "passes.csv"}) {
            CHECK(fs::exists(dir / c / f));
        }
    }
    check_tree(dir);
}

TEST_CASE("sweep output is byte-identical across runs") {
    const auto a = fsonet::testing::scratch_dir("cli_det_a");
    const auto b = fsonet::testing::scratch_dir("cli_det_b");
    const auto cfg = fixture_path("mini.cfg").string();
    REQUIRE(run_cli({"sweep", "--scenario", cfg, "--out", a.string()}).code == cli::kExitOk);
    REQUIRE(run_cli({"sweep", "--scenario", cfg, "--out", b.string()}).code == cli::kExitOk);
    const auto sa = snapshot(a);
    CHECK(sa.size() > 10);
    CHECK(sa == snapshot(b));
}

TEST_CASE("every subcommand writes its tables") {
    const auto cfg = fixture_path("mini.cfg").string();
    const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
        {"passes", {"passes.csv"}},
        {"weather-stats", {"weather.csv", "weather_stats.csv"}},
        {"synth-weather", {"weather.csv"}},
        {"linkbudget", {"linkbudget.csv"}},
        {"availability", {"availability_monthly.csv", "station_availability.csv"}},
        {"throughput", {"per_pass.csv", "throughput_monthly.csv", "buffer.csv"}},
        {"correlate", {"correlation.csv", "correlation.svg"}},
    };
    for (const auto& [cmd, files] : cases) {
        INFO(cmd);
        const auto dir = fsonet::testing::scratch_dir("cli_" + cmd);
        const auto r = run_cli({cmd, "--scenario", cfg, "--out", dir.string()});
        CHECK(r.code == cli::kExitOk);
        CHECK(r.err.empty());
        for (const auto& f : files) {
            CHECK(fs::exists(dir / f));
        }
        check_tree(dir);
    }
}

TEST_CASE("global flags reach the scenario") {
    const auto cfg = fixture_path("mini.cfg").string();
    const auto d1 = fsonet::testing::scratch_dir("cli_flags_1");
    const auto d2 = fsonet::testing::scratch_dir("cli_flags_2");
    const auto d3 = fsonet::testing::scratch_dir("cli_flags_3");
    REQUIRE(run_cli({"synth-weather", "--scenario", cfg, "--out", d1.string()}).code == 0);
    REQUIRE(run_cli({"synth-weather", "--scenario", cfg, "--out", d2.string(), "--seed", "8"}).code == 0);
    CHECK(slurp(d1 / "weather.csv") != slurp(d2 / "weather.csv"));

    REQUIRE(run_cli({"passes", "--scenario", cfg, "--out", d1.string()}).code == 0);
    REQUIRE(run_cli({"passes", "--scenario", cfg, "--out", d3.string(), "--min-elevation", "40"}).code == 0);
    CHECK(parse_csv(slurp(d3 / "passes.csv")).size() < parse_csv(slurp(d1 / "passes.csv")).size());

    REQUIRE(run_cli({"weather-stats", "--scenario", cfg, "--out", d1.string()}).code == 0);
    REQUIRE(run_cli({"weather-stats", "--scenario", cfg, "--out", d3.string(), "--threshold", "0"}).code == 0);
    const auto strict = parse_csv(slurp(d1 / "weather_stats.csv"));
    const auto closed = parse_csv(slurp(d3 / "weather_stats.csv"));
    CHECK(closed[1][5] == "0.0000");
    CHECK(strict[1][5] == "57.1726");
}

TEST_CASE("directory names for configurations") {
    CHECK(cli::directory_name("config1") == "config1");
    const auto odd = cli::directory_name("a/b c");
    CHECK(odd.find('/') == std::string::npos);
    CHECK(odd.find(' ') == std::string::npos);
}
