#include "fsonet/cli.hpp"

#include "fsonet/chart.hpp"
#include "fsonet/csv.hpp"
#include "fsonet/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <map>
#include <set>

namespace fsonet::cli {

namespace fs = std::filesystem;
using scenario::ConfigurationResult;
using scenario::JoinedData;
using scenario::Scenario;
using scenario::SweepResult;

namespace {

struct Options {
    std::string scenario_path;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<double> min_elevation;
    std::optional<double> threshold;
    std::string config;
};

Scenario load(const Options& o) {
    std::vector<scenario::Override> overrides;
    for (const auto& s : o.sets) {
        overrides.push_back(scenario::parse_override(s));
    }
    Scenario sc = scenario::load_scenario(o.scenario_path, overrides);
    if (o.seed) {
        sc.weather.seed = *o.seed;
    }
    if (o.min_elevation) {
        if (!(*o.min_elevation >= 0.0 && *o.min_elevation < 90.0)) {
            throw Error(ErrorCode::InvalidThreshold,
                        fmt::format("--min-elevation {} outside [0, 90)", *o.min_elevation));
        }
        for (auto& g : sc.stations) {
            g.min_elevation = *o.min_elevation;
        }
    }
    if (o.threshold) {
        if (!(*o.threshold >= 0.0 && *o.threshold <= 1.0)) {
            throw Error(ErrorCode::ConfigError, fmt::format("--threshold {} outside [0, 1]", *o.threshold));
        }
        sc.threshold = *o.threshold;
        sc.loss.cloud_threshold = *o.threshold;
    }
    return sc;
}

fs::path prepare(const Options& o) {
    const fs::path dir{o.out_dir};
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    return dir;
}

const scenario::NetworkConfiguration& chosen(const Scenario& sc, const Options& o) {
    return o.config.empty() ? sc.configurations.front() : sc.configuration(o.config);
}

std::string opt_fixed(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string{};
}

void write_config_tables(const ConfigurationResult& r, const JoinedData& joined, const Scenario& sc,
                         const fs::path& dir) {
    fs::create_directories(dir);
    analysis::write_availability_monthly_csv((dir / "availability_monthly.csv").string(), r.availability);
    analysis::write_station_availability_csv((dir / "station_availability.csv").string(), r.availability);
    analysis::write_throughput_monthly_csv((dir / "throughput_monthly.csv").string(), r.throughput);
    analysis::write_per_pass_csv((dir / "per_pass.csv").string(), r.throughput);
    if (r.buffer) {
        analysis::write_buffer_csv((dir / "buffer.csv").string(), *r.buffer);
    }
    std::vector<passes::Pass> all;
    for (const auto& id : r.station_ids) {
        const auto& d = joined.stations.at(sc.station_index(id));
        all.insert(all.end(), d.passes.begin(), d.passes.end());
    }
    passes::write_passes_csv((dir / "passes.csv").string(), all);
}

chart::ChartData correlation_chart(const analysis::CorrelationMatrix& m) {
    chart::ChartData c;
    c.title = "Pearson correlation of cloud fraction";
    c.y_label = "r";
    c.categories = m.station_ids;
    c.matrix = m.values;
    return c;
}

std::vector<std::string> month_axis(const SweepResult& sweep, bool availability) {
    std::set<YearMonth> months;
    for (const auto& r : sweep.configurations) {
        for (const auto& m : availability ? r.availability.per_month : r.throughput.per_month) {
            months.insert(m.month);
        }
    }
    std::vector<std::string> out;
    if (months.empty()) {
        return out;
    }
    for (YearMonth m = *months.begin(); m <= *months.rbegin(); m = m.next()) {
        out.push_back(m.to_string());
    }
    return out;
}

std::vector<double> along(const std::vector<std::string>& axis, const std::vector<analysis::MonthValue>& values,
                          double scale) {
    std::map<std::string, double> by;
    for (const auto& m : values) {
        by[m.month.to_string()] = m.value * scale;
    }
    std::vector<double> out;
    for (const auto& label : axis) {
        out.push_back(by.count(label) ? by[label] : 0.0);
    }
    return out;
}

void log_error(std::ostream& err, const std::exception& e) { err << "error: " << e.what() << '\n'; }

}  // namespace

std::string directory_name(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += keep ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") {
        out = "_" + out;
    }
    return out;
}

void write_sweep(const Scenario& sc, const JoinedData& joined, const SweepResult& sweep, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    {
        CsvWriter csv((out_dir / "summary.csv").string(),
                      {"configuration", "A_overall_pct", "T_gbits", "pdt_pct", "outage_pct"});
        for (const auto& r : sweep.configurations) {
            csv.row({r.name, opt_fixed(r.availability.overall_pct, 4), format_fixed(r.throughput.total_bits / 1e9, 6),
                     opt_fixed(r.pdt_pct, 4), opt_fixed(r.availability.outage_pct(), 4)});
        }
    }
    for (const auto& r : sweep.configurations) {
        write_config_tables(r, joined, sc, out_dir / directory_name(r.name));
    }
    if (sweep.correlation.size() > 0) {
        analysis::write_correlation_csv((out_dir / "correlation.csv").string(), sweep.correlation);
        chart::render_chart(correlation_chart(sweep.correlation), chart::ChartKind::Heatmap,
                            (out_dir / "correlation.svg").string());
    }

    const auto avail_axis = month_axis(sweep, true);
    if (!avail_axis.empty()) {
        chart::ChartData c;
        c.title = "Monthly network availability";
        c.x_label = "Month";
        c.y_label = "Availability (%)";
        c.categories = avail_axis;
        for (const auto& r : sweep.configurations) {
            c.series.push_back({r.name, {}, along(avail_axis, r.availability.per_month, 1.0)});
        }
        chart::render_chart(c, chart::ChartKind::Line, (out_dir / "availability_monthly.svg").string());
    }
    const auto data_axis = month_axis(sweep, false);
    if (!data_axis.empty()) {
        chart::ChartData c;
        c.title = "Monthly transmitted data";
        c.x_label = "Month";
        c.y_label = "Transmitted data (Gbit)";
        c.categories = data_axis;
        for (const auto& r : sweep.configurations) {
            c.series.push_back({r.name, {}, along(data_axis, r.throughput.per_month, 1e-9)});
        }
        chart::render_chart(c, chart::ChartKind::Line, (out_dir / "throughput_monthly.svg").string());
    }
    {
        chart::ChartData c;
        c.title = sweep.normalized_to ? fmt::format("PDT normalized to {}", *sweep.normalized_to)
                                      : std::string("Percentage of data transferred");
        c.x_label = "Configuration";
        c.y_label = "PDT (%)";
        chart::Series s{"PDT", {}, {}};
        for (const auto& r : sweep.configurations) {
            c.categories.push_back(r.name);
            s.y.push_back(r.pdt_pct.value_or(0.0));
        }
        c.series.push_back(std::move(s));
        chart::render_chart(c, chart::ChartKind::Bar, (out_dir / "pdt.svg").string());
    }
    {
        chart::ChartData c;
        c.title = "Availability against transmitted data";
        c.x_label = "Network availability (%)";
        c.y_label = "Transmitted data (Gbit)";
        for (const auto& r : sweep.configurations) {
            if (r.availability.overall_pct) {
                c.series.push_back({r.name, {*r.availability.overall_pct}, {r.throughput.total_bits / 1e9}});
            }
        }
        if (!c.series.empty()) {
            chart::render_chart(c, chart::ChartKind::Scatter, (out_dir / "availability_vs_data.svg").string());
        }
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Space-to-ground optical network simulator"};
    app.name("fsonet");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--scenario", o.scenario_path, "Scenario configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    app.add_option("--set", o.sets, "Override section.key=value (repeatable)")->take_all()->allow_extra_args(false);
    app.add_option("--seed", o.seed, "Synthetic weather seed");
    app.add_option("--min-elevation", o.min_elevation, "Elevation mask for every station (deg)");
    app.add_option("--threshold", o.threshold, "Cloud fraction threshold");

    auto* passes_cmd = app.add_subcommand("passes", "Visibility passes per station");
    auto* weather_cmd = app.add_subcommand("weather-stats", "Per-station weather series and statistics");
    auto* link_cmd = app.add_subcommand("linkbudget", "Link budget for every pass sample");
    auto* avail_cmd = app.add_subcommand("availability", "Network availability of one configuration");
    auto* tput_cmd = app.add_subcommand("throughput", "Throughput and buffer of one configuration");
    auto* corr_cmd = app.add_subcommand("correlate", "Pairwise cloud correlation");
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate every configuration and draw charts");
    auto* synth_cmd = app.add_subcommand("synth-weather", "Generate synthetic weather for the catalog");
    for (auto* cmd : {avail_cmd, tput_cmd}) {
        cmd->add_option("--config", o.config, "Configuration name (default: first)");
    }
    for (auto* cmd : app.get_subcommands({})) {
        cmd->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (o.scenario_path.empty()) {
        err << "error: --scenario is required\n";
        return kExitUsage;
    }

    try {
        const Scenario sc = load(o);
        const fs::path dir = prepare(o);

        if (passes_cmd->parsed()) {
            std::vector<passes::Pass> all;
            for (const auto& g : sc.stations) {
                auto p = passes::find_passes(sc.tle, g.site, sc.window, g.min_elevation, g.id);
                const auto stats = passes::pass_statistics(p);
                out << fmt::format("{}: {} passes, {} s total\n", g.id, stats.count, stats.total_duration);
                all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
            }
            passes::write_passes_csv((dir / "passes.csv").string(), all);
        } else if (weather_cmd->parsed() || synth_cmd->parsed()) {
            Scenario source = sc;
            if (synth_cmd->parsed()) {
                source.weather.kind = scenario::WeatherSource::Kind::Synthetic;
            }
            const auto wx = scenario::load_weather(source);
            weather::write_weather_csv((dir / "weather.csv").string(), wx);
            if (weather_cmd->parsed()) {
                CsvWriter csv((dir / "weather_stats.csv").string(),
                              {"station_id", "samples", "first", "last", "mean_cloud_fraction", "cflos_pct", "cn2"});
                for (const auto& s : wx) {
                    double sum = 0.0;
                    std::size_t clear = 0;
                    for (const auto& x : s.samples) {
                        sum += x.cloud_fraction;
                        clear += x.cloud_fraction < sc.threshold ? 1 : 0;
                    }
                    const double n = static_cast<double>(s.samples.size());
                    csv.row({s.station_id, std::to_string(s.samples.size()), to_iso8601(s.first()),
                             to_iso8601(s.last()), format_fixed(sum / n, 6), format_fixed(100.0 * clear / n, 4),
                             fmt::format("{:.6e}", s.samples.front().cn2.value_or(0.0))});
                }
            }
            out << fmt::format("wrote weather for {} stations\n", wx.size());
        } else if (link_cmd->parsed()) {
            const JoinedData joined = scenario::integrate(sc);
            CsvWriter csv((dir / "linkbudget.csv").string(),
                          {"station_id", "timestamp", "elevation_deg", "slant_range_m", "cloud_fraction", "fspl_db",
                           "gain_tx_db", "gain_rx_db", "pointing_loss_db", "atmospheric_loss_db", "cloud_loss_db",
                           "turbulence_loss_db", "received_power_dbw", "snr_db", "capacity_bps"});
            for (const auto& d : joined.stations) {
                const auto& g = sc.stations[d.station];
                for (std::size_t p = 0; p < d.passes.size(); ++p) {
                    for (std::size_t k = 0; k < d.passes[p].samples.size(); ++k) {
                        const auto& geo = d.passes[p].samples[k];
                        const auto& wx = d.pass_weather[p][k];
                        link::LinkEnvironment env = g.environment;
                        env.cloud_fraction = wx.cloud_fraction;
                        env.cn2 = wx.cn2.value_or(env.cn2);
                        const auto r = link::link_budget(g.terminal, sc.noise, env, geo, sc.loss);
                        csv.row({g.id, to_iso8601(geo.time), format_fixed(geo.elevation, 4),
                                 format_fixed(geo.slant_range, 1), format_fixed(wx.cloud_fraction, 4),
                                 format_fixed(r.free_space_loss_db, 4), format_fixed(r.tx_gain_db, 4),
                                 format_fixed(r.rx_gain_db, 4), format_fixed(r.pointing_loss_db, 4),
                                 format_fixed(r.atmospheric_loss_db, 4), opt_fixed(r.cloud_loss_db, 4),
                                 format_fixed(r.turbulence_loss_db, 4), opt_fixed(r.received_power_dbw, 4),
                                 opt_fixed(r.snr_db, 4), format_fixed(r.capacity_bps, 1)});
                    }
                }
            }
        } else if (avail_cmd->parsed()) {
            const auto& c = chosen(sc, o);
            const auto all = scenario::load_weather(sc);
            std::vector<weather::WeatherSeries> wx;
            for (const auto& id : c.station_ids) {
                const auto& s = all[sc.station_index(id)];
                if (s.samples.empty() || s.first() > sc.window.start || s.last() < sc.window.end) {
                    throw Error(ErrorCode::SpanMismatch,
                                fmt::format("weather for '{}' does not cover [{}, {}]", id,
                                            to_iso8601(sc.window.start), to_iso8601(sc.window.end)));
                }
                wx.push_back(weather::slice(s, sc.window));
            }
            const auto report = analysis::availability_series(wx, sc.threshold, sc.availability_cadence);
            analysis::write_availability_monthly_csv((dir / "availability_monthly.csv").string(), report);
            analysis::write_station_availability_csv((dir / "station_availability.csv").string(), report);
            out << fmt::format("{}: availability {} %, outage {} %\n", c.name, opt_fixed(report.overall_pct, 4),
                               opt_fixed(report.outage_pct(), 4));
        } else if (tput_cmd->parsed()) {
            const auto& c = chosen(sc, o);
            const JoinedData joined = scenario::integrate(sc);
            const auto r = scenario::evaluate_configuration(sc, joined, c);
            analysis::write_per_pass_csv((dir / "per_pass.csv").string(), r.throughput);
            analysis::write_throughput_monthly_csv((dir / "throughput_monthly.csv").string(), r.throughput);
            if (r.buffer) {
                analysis::write_buffer_csv((dir / "buffer.csv").string(), *r.buffer);
            }
            out << fmt::format("{}: T = {} Gbit, PDT {} %\n", c.name, format_fixed(r.throughput.total_bits / 1e9, 6),
                               opt_fixed(r.throughput.pdt_pct, 4));
        } else if (corr_cmd->parsed()) {
            const auto all = scenario::load_weather(sc);
            const auto m = analysis::pearson_cloud_correlation(all, sc.availability_cadence);
            analysis::write_correlation_csv((dir / "correlation.csv").string(), m);
            chart::render_chart(correlation_chart(m), chart::ChartKind::Heatmap, (dir / "correlation.svg").string());
        } else if (sweep_cmd->parsed()) {
            const JoinedData joined = scenario::integrate(sc);
            const SweepResult sweep = scenario::run_sweep(sc, joined);
            write_sweep(sc, joined, sweep, dir);
            for (const auto& r : sweep.configurations) {
                out << fmt::format("{}: availability {} %, T = {} Gbit, PDT {} %\n", r.name,
                                   opt_fixed(r.availability.overall_pct, 4),
                                   format_fixed(r.throughput.total_bits / 1e9, 3), opt_fixed(r.pdt_pct, 4));
            }
        }
    } catch (const Error& e) {
        log_error(err, e);
        return e.code() == ErrorCode::InvariantViolation ? kExitInternal : kExitData;
    } catch (const fs::filesystem_error& e) {
        log_error(err, e);
        return kExitData;
    } catch (const std::exception& e) {
        log_error(err, e);
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace fsonet::cli
