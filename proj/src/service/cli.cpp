#include "areacfd/service/cli.hpp"

#include "areacfd/backtest.hpp"
#include "areacfd/error.hpp"
#include "areacfd/service/engine.hpp"
#include "areacfd/service/http_api.hpp"
#include "areacfd/service/json_io.hpp"
#include "areacfd/service/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace areacfd::service {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string data;
    std::string areas;
    std::string profiles;
    std::string posteriors;
    unsigned threads = 1;
    bool strict = false;
    bool drop_stale = false;
    double days_per_month = elicitation::kDefaultDaysPerMonth;

    std::string area;
    std::vector<std::string> horizons;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::vector<double> levels{0.025, 0.5, 0.975};
    bool noise = false;
    std::string out;
    std::string table;
    std::string from;
    std::string to;
    std::string host = "127.0.0.1";
    int port = 8080;
};

JobConfig job_config(const Options& o) {
    if (o.data.empty()) {
        throw Error("config.invalid", fmt::format("no data directory; pass --data or set {}", kDataDirEnv));
    }
    JobConfig c;
    c.data_dir = o.data;
    if (!o.areas.empty()) {
        c.areas_file = o.areas;
    }
    if (!o.profiles.empty()) {
        c.profile_dir = o.profiles;
    }
    if (!o.posteriors.empty()) {
        c.posteriors_file = o.posteriors;
    }
    for (const auto& h : o.horizons) {
        c.horizons.push_back(market::parse_horizon(h));
    }
    c.n_draws = o.n;
    c.seed = o.seed;
    c.levels = o.levels;
    c.days_per_month = o.days_per_month;
    c.drop_stale = o.drop_stale;
    c.noise = o.noise;
    c.strict = o.strict;
    c.threads = o.threads;
    c.validate();
    return c;
}

market::Horizon single_horizon(const Options& o) {
    if (o.horizons.size() != 1) {
        throw Error("cli.usage", "exactly one --horizon is required");
    }
    return market::parse_horizon(o.horizons.front());
}

// Writes to --out when given, otherwise to `out`.
template <typename Fn>
void emit(const Options& o, std::ostream& out, Fn&& write) {
    if (o.out.empty()) {
        write(out);
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        throw Error("cli.io", fmt::format("cannot write '{}'", o.out));
    }
    write(file);
}

void report_diagnostics(const std::vector<market::Diagnostic>& diagnostics, std::ostream& err) {
    for (const auto& d : diagnostics) {
        err << fmt::format("warning: {}: {}{}\n", d.code, d.message, d.source.empty() ? "" : " (" + d.source + ")");
    }
}

void cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
    const auto config = job_config(o);
    market::IngestOptions io;
    io.strict = config.strict;
    io.areas_file = config.areas_file;
    const auto result = market::ingest(config.data_dir, io);
    report_diagnostics(result.diagnostics, err);
    if (!o.out.empty()) {
        market::export_panel(result.panel, o.out);
    }
    out << panel_summary(result.panel, result.diagnostics.size()).dump(2) << '\n';
}

void cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
    auto config = job_config(o);
    config.posteriors_file.reset();
    const Engine engine(config);
    report_diagnostics(engine.diagnostics(), err);
    for (const auto& f : engine.fit_failures()) {
        err << fmt::format("warning: {}: {} {} from {}: {}\n", f.code, f.area, market::to_string(f.horizon), f.epoch,
                           f.message);
    }
    const fs::path target = o.out.empty() ? config.data_dir / "posteriors.json" : fs::path(o.out);
    save_posteriors(engine.posteriors(), target);
    const fs::path table = o.table.empty() ? target.parent_path() / "coefficients.csv" : fs::path(o.table);
    {
        std::ofstream file(table, std::ios::binary);
        if (!file) {
            throw Error("cli.io", fmt::format("cannot write '{}'", table.string()));
        }
        write_coefficient_csv(engine.posteriors(), engine.panel(), file);
    }
    print_coefficient_table(engine.posteriors(), engine.panel(), out);
    out << fmt::format("wrote {} posteriors to {} and the table to {}\n", engine.posteriors().size(), target.string(),
                       table.string());
}

void cmd_elicit(const Options& o, std::istream& in, std::ostream& out) {
    const auto config = job_config(o);
    market::IngestOptions io;
    io.areas_file = config.areas_file;
    const auto panel = market::ingest(config.data_dir, io).panel;
    const auto& target = panel.area(o.area);
    if (target.observed_cfd) {
        throw Error("elicitation.not_observed", fmt::format("{} has observed CfDs; elicit unobserved areas only", o.area));
    }
    const auto transcript = elicitation::run_interactive(in, out, o.area, panel.areas());
    const auto profile = elicitation::elicit_session(transcript, panel.areas());
    ProfileStore store(config.profiles());
    const auto stored = store.put(profile, panel.areas());
    if (!o.out.empty()) {
        std::ofstream file(o.out, std::ios::binary);
        file << elicitation::to_json(stored.profile).dump(2) << '\n';
    }
    out << fmt::format("\nstored profile for {} (version {}) in {}\n", o.area, stored.version,
                       store.dir().string());
}

forecast::ForecastOptions forecast_options(const Options& o, const JobConfig& config) {
    auto fo = config.forecast_options();
    if (!o.from.empty() || !o.to.empty()) {
        fo.window = DateRange{o.from.empty() ? Date::min() : parse_date(o.from),
                              o.to.empty() ? Date::max() : parse_date(o.to)};
    }
    return fo;
}

void cmd_forecast(const Options& o, std::ostream& out, std::ostream& err) {
    auto config = job_config(o);
    const auto h = single_horizon(o);
    config.horizons = {h};
    const Engine engine(config);
    report_diagnostics(engine.diagnostics(), err);
    const auto result = engine.forecast(o.area, h, forecast_options(o, config));
    emit(o, out, [&](std::ostream& s) { forecast::write_csv(result, s); });
}

void cmd_backtest(const Options& o, std::ostream& out, std::ostream& err) {
    auto config = job_config(o);
    const auto h = single_horizon(o);
    config.horizons = {h};
    const Engine engine(config);
    std::vector<market::Diagnostic> diagnostics;
    const auto records = engine.backtest(o.area, h, forecast_options(o, config), &diagnostics);
    report_diagnostics(diagnostics, err);
    emit(o, out, [&](std::ostream& s) { forecast::write_csv(records, s); });
}

void cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    Engine engine(job_config(o));
    report_diagnostics(engine.diagnostics(), err);
    HttpService service(engine);
    out << fmt::format("listening on http://{}:{}\n", o.host, o.port) << std::flush;
    if (!service.listen(o.host, o.port)) {
        throw Error("service.listen", fmt::format("cannot listen on {}:{}", o.host, o.port));
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Hypothetical area CfD prices from observed CfDs and expert judgement", "areacfd"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--data", o.data, "Data directory")->envname(kDataDirEnv);
    app.add_option("--areas", o.areas, "Area declarations (default <data>/areas.csv)");
    app.add_option("--profiles", o.profiles, "Profile directory (default <data>/profiles)");
    app.add_option("--posteriors", o.posteriors, "Load posteriors from this file instead of fitting");
    app.add_option("--threads", o.threads, "Worker threads, 0 for all cores");
    app.add_flag("--strict", o.strict, "Fail on rows that break panel invariants");
    app.add_flag("--drop-stale", o.drop_stale, "Exclude stale closes from fitting");
    app.add_option("--days-per-month", o.days_per_month, "Trading days per month of expert confidence");

    auto* ingest = app.add_subcommand("ingest", "Build a panel and optionally write its canonical CSVs");
    ingest->add_option("--out", o.out, "Directory for the canonical panel");

    auto* fit = app.add_subcommand("fit", "Fit posteriors for every observed area, horizon and epoch");
    fit->add_option("--horizon", o.horizons, "Horizons to fit (default: all with forwards)");
    fit->add_option("--out", o.out, "Posterior file (default <data>/posteriors.json)");
    fit->add_option("--table", o.table, "Coefficient table CSV (default next to the posterior file)");

    auto* elicit = app.add_subcommand("elicit", "Interview an expert about an unobserved area");
    elicit->add_option("--area", o.area, "Target area")->required();
    elicit->add_option("--out", o.out, "Also write the profile document here");

    auto* fc = app.add_subcommand("forecast", "Predictive CfD band for an area");
    auto* bt = app.add_subcommand("backtest", "Last quote against realised spot per delivery period");
    for (auto* cmd : {fc, bt}) {
        cmd->add_option("--area", o.area, "Target area")->required();
        cmd->add_option("--horizon", o.horizons, "Contract horizon")->required()->expected(1);
        cmd->add_option("--n", o.n, "Monte Carlo draws");
        cmd->add_option("--seed", o.seed, "Random seed");
        cmd->add_option("--levels", o.levels, "Quantile levels")->delimiter(',');
        cmd->add_flag("--noise", o.noise, "Add regression noise to each draw");
        cmd->add_option("--from", o.from, "First date (YYYY-MM-DD)");
        cmd->add_option("--to", o.to, "Last date (YYYY-MM-DD)");
        cmd->add_option("--out", o.out, "Output CSV (default stdout)");
    }

    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    serve->add_option("--host", o.host, "Bind address");
    serve->add_option("--port", o.port, "Port");
    serve->add_option("--n", o.n, "Default Monte Carlo draws");
    serve->add_option("--seed", o.seed, "Default seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        err << fmt::format("error: cli.usage: {}\n", message);
        return 2;
    }

    try {
        if (*ingest) {
            cmd_ingest(o, out, err);
        } else if (*fit) {
            cmd_fit(o, out, err);
        } else if (*elicit) {
            cmd_elicit(o, in, out);
        } else if (*fc) {
            cmd_forecast(o, out, err);
        } else if (*bt) {
            cmd_backtest(o, out, err);
        } else if (*serve) {
            cmd_serve(o, out, err);
        }
    } catch (const Error& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        err << fmt::format("error: {}: {}\n", e.code(), message);
        return e.code() == "cli.usage" ? 2 : 1;
    } catch (const std::exception& e) {
        err << fmt::format("error: internal: {}\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace areacfd::service
