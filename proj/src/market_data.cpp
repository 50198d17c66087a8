#include "areacfd/market_data.hpp"

#include "areacfd/error.hpp"
#include "areacfd/seasonal.hpp"
#include "csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace areacfd::market {

namespace {

constexpr std::array<std::string_view, 8> kHorizonNames{"M1", "M2", "Q1", "Q2", "Q3", "Y1", "Y2", "Y3"};
constexpr std::array<std::string_view, 4> kCovariateNames{"FW", "SA", "SS", "WA"};

// A weekly reservoir reading stands for the day it was taken and the six after.
constexpr int kReservoirFillDays = 6;

bool same_value(double a, double b) { return (is_missing(a) && is_missing(b)) || a == b; }

bool same_series(const Series& a, const Series& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same_value);
}

template <typename Map>
bool same_series_map(const Map& a, const Map& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !same_series(ia->second, ib->second)) {
            return false;
        }
    }
    return true;
}

void report(std::vector<Diagnostic>* sink, bool strict, std::string code, std::string message, std::string source) {
    if (strict) {
        throw Error(code, source.empty() ? message : fmt::format("{}: {}", source, message));
    }
    if (sink != nullptr) {
        sink->push_back({std::move(code), std::move(message), std::move(source)});
    }
}

}  // namespace

std::string_view to_string(Horizon h) { return kHorizonNames[static_cast<std::size_t>(h)]; }

Horizon parse_horizon(std::string_view text) {
    for (std::size_t i = 0; i < kHorizonNames.size(); ++i) {
        if (kHorizonNames[i] == text) {
            return static_cast<Horizon>(i);
        }
    }
    throw Error("market.unknown_horizon", fmt::format("unknown horizon '{}'", text));
}

std::string_view to_string(Covariate c) { return kCovariateNames[static_cast<std::size_t>(c)]; }

Covariate parse_covariate(std::string_view text) {
    for (std::size_t i = 0; i < kCovariateNames.size(); ++i) {
        if (kCovariateNames[i] == text) {
            return static_cast<Covariate>(i);
        }
    }
    throw Error("market.unknown_covariate", fmt::format("unknown covariate '{}'", text));
}

std::vector<Covariate> covariates_for(bool has_hydro) {
    std::vector<Covariate> cols{Covariate::FW, Covariate::SA, Covariate::SS};
    if (has_hydro) {
        cols.push_back(Covariate::WA);
    }
    return cols;
}

std::vector<bool> flag_stale(std::span<const double> prices) {
    std::vector<bool> flags(prices.size(), false);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        flags[i] = prices[i] == prices[i - 1];
    }
    return flags;
}

// ---------------------------------------------------------------------------
// MarketPanel

bool MarketPanel::has_area(std::string_view code) const {
    return std::any_of(areas_.begin(), areas_.end(), [&](const AreaInfo& a) { return a.code == code; });
}

const AreaInfo& MarketPanel::area(std::string_view code) const {
    for (const auto& a : areas_) {
        if (a.code == code) {
            return a;
        }
    }
    throw Error("market.unknown_area", fmt::format("unknown area '{}'", code));
}

std::optional<std::size_t> MarketPanel::index_of(Date d) const {
    const auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end() || *it != d) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - dates_.begin());
}

std::vector<Epoch> MarketPanel::epochs() const {
    std::vector<Epoch> out;
    if (dates_.empty()) {
        return out;
    }
    Date start = dates_.front();
    for (const Date r : redefinitions_) {
        if (r <= start || r > dates_.back()) {
            continue;
        }
        out.push_back({out.size(), {start, r - std::chrono::days{1}}});
        start = r;
    }
    out.push_back({out.size(), {start, dates_.back()}});
    return out;
}

Epoch MarketPanel::epoch_of(Date d) const {
    for (const auto& e : epochs()) {
        if (e.range.contains(d)) {
            return e;
        }
    }
    throw Error("market.outside_panel", fmt::format("{} is outside the panel calendar", format_date(d)));
}

const Series& MarketPanel::area_spot(std::string_view area) const {
    const auto it = area_spot_.find(area);
    if (it == area_spot_.end()) {
        throw Error("market.unknown_area", fmt::format("unknown area '{}'", area));
    }
    return it->second;
}

const Series& MarketPanel::forward(Horizon h) const {
    const auto it = forward_.find(h);
    if (it == forward_.end()) {
        throw Error("market.no_forward", fmt::format("no forward quotes for horizon {}", to_string(h)));
    }
    return it->second;
}

const Series* MarketPanel::cfd(std::string_view area, Horizon h) const {
    const auto it = cfd_.find({std::string(area), h});
    return it == cfd_.end() ? nullptr : &it->second;
}

const std::vector<bool>* MarketPanel::stale(std::string_view area, Horizon h) const {
    const auto it = stale_.find({std::string(area), h});
    return it == stale_.end() ? nullptr : &it->second;
}

const Series* MarketPanel::reservoir_deviation(std::string_view area) const {
    const auto it = wa_.find(area);
    return it == wa_.end() ? nullptr : &it->second;
}

std::vector<Horizon> MarketPanel::horizons() const {
    std::vector<Horizon> out;
    for (const auto& [h, series] : forward_) {
        out.push_back(h);
    }
    return out;
}

bool MarketPanel::operator==(const MarketPanel& other) const {
    return areas_ == other.areas_ && dates_ == other.dates_ && redefinitions_ == other.redefinitions_ &&
           same_series(system_spot_, other.system_spot_) && same_series_map(area_spot_, other.area_spot_) &&
           same_series_map(forward_, other.forward_) && same_series_map(cfd_, other.cfd_) &&
           stale_ == other.stale_ && same_series_map(wa_, other.wa_);
}

// ---------------------------------------------------------------------------
// PanelBuilder

PanelBuilder::PanelBuilder(std::vector<AreaInfo> areas) : areas_(std::move(areas)) {
    std::set<std::string, std::less<>> seen;
    for (const auto& a : areas_) {
        if (a.code.empty()) {
            throw Error("market.invalid_area", "area code must be non-empty");
        }
        if (a.code == "SYS") {
            throw Error("market.invalid_area", "'SYS' is reserved for the system price");
        }
        if (!seen.insert(a.code).second) {
            throw Error("market.invalid_area", fmt::format("area '{}' declared twice", a.code));
        }
    }
}

const AreaInfo& PanelBuilder::known_area(std::string_view code) const {
    for (const auto& a : areas_) {
        if (a.code == code) {
            return a;
        }
    }
    throw Error("market.unknown_area", fmt::format("unknown area '{}'", code));
}

void PanelBuilder::insert(Column& column, Date d, double value, std::string source, std::string_view what) {
    if (!std::isfinite(value)) {
        throw Error("market.malformed_row", fmt::format("{}: non-finite {} value", source, what));
    }
    const auto [it, inserted] = column.try_emplace(d, Entry{value, source});
    if (!inserted) {
        throw Error("market.duplicate_key",
                    fmt::format("{}: duplicate {} on {} (first seen at {})", source.empty() ? "?" : source, what,
                                format_date(d), it->second.source.empty() ? "?" : it->second.source));
    }
}

void PanelBuilder::add_redefinition(Date d) { redefinitions_.push_back(d); }

void PanelBuilder::add_system_spot(Date d, double price, std::string source) {
    insert(system_spot_, d, price, std::move(source), "system spot");
}

void PanelBuilder::add_area_spot(std::string_view area, Date d, double price, std::string source) {
    known_area(area);
    insert(area_spot_[std::string(area)], d, price, std::move(source), fmt::format("{} spot", area));
}

void PanelBuilder::add_forward(Horizon h, Date d, double price, std::string source) {
    insert(forward_[h], d, price, std::move(source), fmt::format("{} forward", to_string(h)));
}

void PanelBuilder::add_cfd(std::string_view area, Horizon h, Date d, double price, std::string source) {
    known_area(area);
    insert(cfd_[{std::string(area), h}], d, price, std::move(source),
           fmt::format("{} {} CfD", area, to_string(h)));
}

void PanelBuilder::add_reservoir_deviation(std::string_view area, Date d, double value, std::string source) {
    if (!known_area(area).has_hydro) {
        throw Error("market.invariant", fmt::format("{}: area {} has no hydro but a reservoir value", source, area));
    }
    insert(wa_[std::string(area)], d, value, std::move(source), fmt::format("{} reservoir", area));
}

MarketPanel PanelBuilder::build(std::vector<Diagnostic>* diagnostics, bool strict) && {
    if (system_spot_.empty()) {
        throw Error("market.empty_panel", "no system spot prices: the panel calendar is empty");
    }

    MarketPanel panel;
    panel.areas_ = areas_;
    for (const auto& [d, e] : system_spot_) {
        panel.dates_.push_back(d);
        panel.system_spot_.push_back(e.value);
    }
    std::sort(redefinitions_.begin(), redefinitions_.end());
    redefinitions_.erase(std::unique(redefinitions_.begin(), redefinitions_.end()), redefinitions_.end());
    panel.redefinitions_ = redefinitions_;

    const std::size_t n = panel.dates_.size();
    auto place = [&](const Column& column, std::string_view what, auto&& accept) {
        Series series(n, kMissing);
        for (const auto& [d, e] : column) {
            const auto idx = panel.index_of(d);
            if (!idx) {
                report(diagnostics, strict, "market.off_calendar",
                       fmt::format("{} on {} has no system spot day; dropped", what, format_date(d)), e.source);
                continue;
            }
            if (accept(*idx, d, e)) {
                series[*idx] = e.value;
            }
        }
        return series;
    };
    auto accept_all = [](std::size_t, Date, const Entry&) { return true; };

    for (const auto& a : areas_) {
        const auto it = area_spot_.find(a.code);
        panel.area_spot_[a.code] = it == area_spot_.end() ? Series(n, kMissing)
                                                          : place(it->second, a.code + " spot", accept_all);
        if (a.has_hydro) {
            const auto wit = wa_.find(a.code);
            panel.wa_[a.code] = wit == wa_.end() ? Series(n, kMissing)
                                                 : place(wit->second, a.code + " reservoir", accept_all);
        }
    }
    for (const auto& [h, column] : forward_) {
        panel.forward_[h] = place(column, fmt::format("{} forward", to_string(h)), accept_all);
    }

    for (const auto& [key, column] : cfd_) {
        const auto& [area, h] = key;
        const auto what = fmt::format("{} {} CfD", area, to_string(h));
        if (!known_area(area).observed_cfd) {
            for (const auto& [d, e] : column) {
                report(diagnostics, strict, "market.unobserved_cfd",
                       fmt::format("{} on {}: area is declared without CfDs; dropped", what, format_date(d)),
                       e.source);
            }
            continue;
        }
        const Series* fw = panel.forward_.count(h) != 0 ? &panel.forward_.at(h) : nullptr;
        Series series = place(column, what, [&](std::size_t idx, Date d, const Entry& e) {
            if (fw != nullptr && !is_missing((*fw)[idx]) && !(e.value > -(*fw)[idx])) {
                report(diagnostics, strict, "market.cfd_below_forward",
                       fmt::format("{} on {}: cfd {} <= -fw {} makes the area forward non-positive; dropped", what,
                                   format_date(d), e.value, (*fw)[idx]),
                       e.source);
                return false;
            }
            return true;
        });

        std::vector<double> observed;
        std::vector<std::size_t> where;
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_missing(series[i])) {
                observed.push_back(series[i]);
                where.push_back(i);
            }
        }
        if (observed.empty()) {
            continue;
        }
        const auto flags = flag_stale(observed);
        std::vector<bool> stale(n, false);
        for (std::size_t k = 0; k < where.size(); ++k) {
            stale[where[k]] = flags[k];
        }
        panel.cfd_[key] = std::move(series);
        panel.stale_[key] = std::move(stale);
    }
    return panel;
}

// ---------------------------------------------------------------------------
// Design matrices

namespace {

template <typename RowFilter>
DesignMatrix assemble(const MarketPanel& panel, std::string_view area, Horizon h, DateRange range,
                      RowFilter&& keep) {
    for (const Date r : panel.redefinitions()) {
        if (range.first < r && r <= range.last) {
            throw Error("market.epoch_straddles_redefinition",
                        fmt::format("{}..{} crosses the area redefinition on {}", format_date(range.first),
                                    format_date(range.last), format_date(r)));
        }
    }
    const auto& info = panel.area(area);
    DesignMatrix dm;
    dm.columns = covariates_for(info.has_hydro);

    const auto& fw = panel.forward(h);
    const auto& sa = panel.area_spot(area);
    const auto& ss = panel.system_spot();
    const Series* wa = info.has_hydro ? panel.reservoir_deviation(area) : nullptr;

    const auto& dates = panel.dates();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (!range.contains(dates[i])) {
            continue;
        }
        const bool complete = !is_missing(fw[i]) && !is_missing(sa[i]) && !is_missing(ss[i]) &&
                              (wa == nullptr || !is_missing((*wa)[i]));
        if (complete && keep(i)) {
            rows.push_back(i);
        } else {
            ++dm.dropped;
        }
    }
    if (rows.empty()) {
        throw Error("market.insufficient_data",
                    fmt::format("{} {}: no complete rows in {}..{}", area, to_string(h), format_date(range.first),
                                format_date(range.last)));
    }

    dm.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dm.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = rows[r];
        const auto row = static_cast<Eigen::Index>(r);
        dm.x(row, 0) = fw[i];
        dm.x(row, 1) = sa[i];
        dm.x(row, 2) = ss[i];
        if (wa != nullptr) {
            dm.x(row, 3) = (*wa)[i];
        }
        dm.dates.push_back(dates[i]);
    }
    return dm;
}

}  // namespace

DesignMatrix design_matrix(const MarketPanel& panel, std::string_view area, Horizon h, DateRange range) {
    return assemble(panel, area, h, range, [](std::size_t) { return true; });
}

RegressionData regression_data(const MarketPanel& panel, std::string_view area, Horizon h, DateRange range,
                               bool drop_stale) {
    const Series* cfd = panel.cfd(area, h);
    if (cfd == nullptr) {
        throw Error("market.no_cfd", fmt::format("no {} CfD series for {}", to_string(h), area));
    }
    const auto* stale = panel.stale(area, h);
    RegressionData data;
    data.design = assemble(panel, area, h, range, [&](std::size_t i) {
        return !is_missing((*cfd)[i]) && !(drop_stale && (*stale)[i]);
    });
    data.y.resize(data.design.x.rows());
    for (std::size_t r = 0; r < data.design.dates.size(); ++r) {
        data.y(static_cast<Eigen::Index>(r)) = (*cfd)[*panel.index_of(data.design.dates[r])];
    }
    return data;
}

// ---------------------------------------------------------------------------
// Reservoir deviations

std::map<std::string, Series, std::less<>> reservoir_deviations(std::span<const ReservoirObservation> observations,
                                                                std::span<const AreaInfo> areas,
                                                                std::span<const ReservoirMapping> mapping,
                                                                const std::vector<Date>& calendar) {
    std::map<std::string, Series, std::less<>> out;
    if (observations.empty()) {
        for (const auto& a : areas) {
            if (a.has_hydro) {
                out[a.code] = Series(calendar.size(), kMissing);
            }
        }
        return out;
    }

    Date origin = observations.front().date;
    std::map<std::string, std::map<Date, double>, std::less<>> by_source;
    for (const auto& obs : observations) {
        origin = std::min(origin, obs.date);
        if (!by_source[obs.source].emplace(obs.date, obs.fill_pct).second) {
            throw Error("market.duplicate_key",
                        fmt::format("duplicate reservoir reading for {} on {}", obs.source, format_date(obs.date)));
        }
    }

    // Residual per historical series, keyed by observation date.
    std::map<std::string, std::map<Date, double>, std::less<>> residuals;
    for (const auto& [source, readings] : by_source) {
        std::vector<seasonal::FillObservation> series;
        series.reserve(readings.size());
        for (const auto& [d, fill] : readings) {
            series.push_back({static_cast<double>((d - origin).count()) / 7.0, fill});
        }
        const auto model = seasonal::fit_seasonal(series, 52.0, source);
        const auto r = seasonal::adjust(series, model);
        auto& dst = residuals[source];
        std::size_t k = 0;
        for (const auto& [d, fill] : readings) {
            dst.emplace(d, r[k++]);
        }
    }

    for (const auto& a : areas) {
        if (!a.has_hydro) {
            continue;
        }
        std::vector<ReservoirMapping> rules;
        for (const auto& m : mapping) {
            if (m.area == a.code) {
                if (!residuals.count(m.source)) {
                    throw Error("market.unknown_source",
                                fmt::format("reservoir map sends {} to unknown series '{}'", a.code, m.source));
                }
                rules.push_back(m);
            }
        }
        std::sort(rules.begin(), rules.end(), [](const auto& l, const auto& r) { return l.from < r.from; });

        Series series(calendar.size(), kMissing);
        for (std::size_t i = 0; i < calendar.size(); ++i) {
            const Date d = calendar[i];
            std::string_view source = a.code;
            for (const auto& rule : rules) {
                if (rule.from <= d) {
                    source = rule.source;
                }
            }
            const auto rit = residuals.find(source);
            if (rit == residuals.end()) {
                continue;
            }
            auto it = rit->second.upper_bound(d);
            if (it == rit->second.begin()) {
                continue;
            }
            --it;
            if ((d - it->first).count() <= kReservoirFillDays) {
                series[i] = it->second;
            }
        }
        out[a.code] = std::move(series);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion and export

namespace {

namespace fs = std::filesystem;
using detail::parse_bool;
using detail::parse_number;
using detail::read_csv;

std::string where(const fs::path& file, std::size_t line) {
    return fmt::format("{}:{}", file.filename().string(), line);
}

Date row_date(const std::string& text, const std::string& at) {
    try {
        return parse_date(text);
    } catch (const Error& e) {
        throw Error("market.malformed_row", fmt::format("{}: {}", at, e.what()));
    }
}

template <typename Fn>
auto with_location(const std::string& at, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() == "market.malformed_row" || e.code() == "market.duplicate_key" ||
            e.code() == "market.invariant") {
            throw;
        }
        throw Error(e.code() == "market.unknown_area" || e.code() == "market.unknown_horizon"
                        ? e.code()
                        : "market.malformed_row",
                    fmt::format("{}: {}", at, e.what()));
    }
}

}  // namespace

IngestResult ingest(const fs::path& dir, const IngestOptions& options) {
    static constexpr std::array<std::string_view, 3> kAreasHeader{"area", "has_hydro", "observed_cfd"};
    static constexpr std::array<std::string_view, 3> kSpotHeader{"date", "area", "price"};
    static constexpr std::array<std::string_view, 3> kForwardHeader{"date", "horizon", "price"};
    static constexpr std::array<std::string_view, 4> kCfdHeader{"date", "area", "horizon", "price"};
    static constexpr std::array<std::string_view, 3> kReservoirHeader{"date", "area", "fill_pct"};
    static constexpr std::array<std::string_view, 3> kMapHeader{"area", "from", "source"};
    static constexpr std::array<std::string_view, 3> kWaHeader{"date", "area", "wa"};
    static constexpr std::array<std::string_view, 1> kRedefHeader{"date"};

    std::vector<AreaInfo> areas;
    {
        const auto file = options.areas_file.value_or(dir / "areas.csv");
        for (const auto& row : read_csv(file, kAreasHeader)) {
            const auto at = where(file, row.line);
            areas.push_back({row.fields[0], parse_bool(row.fields[1], at), parse_bool(row.fields[2], at)});
        }
    }
    PanelBuilder builder(areas);

    if (const auto file = dir / "redefinitions.csv"; fs::exists(file)) {
        for (const auto& row : read_csv(file, kRedefHeader)) {
            builder.add_redefinition(row_date(row.fields[0], where(file, row.line)));
        }
    }
    {
        const auto file = dir / "spot.csv";
        for (const auto& row : read_csv(file, kSpotHeader)) {
            const auto at = where(file, row.line);
            const Date d = row_date(row.fields[0], at);
            const double price = parse_number(row.fields[2], at);
            with_location(at, [&] {
                if (row.fields[1] == "SYS") {
                    builder.add_system_spot(d, price, at);
                } else {
                    builder.add_area_spot(row.fields[1], d, price, at);
                }
                return 0;
            });
        }
    }
    {
        const auto file = dir / "forward.csv";
        for (const auto& row : read_csv(file, kForwardHeader)) {
            const auto at = where(file, row.line);
            const Date d = row_date(row.fields[0], at);
            const double price = parse_number(row.fields[2], at);
            with_location(at, [&] {
                builder.add_forward(parse_horizon(row.fields[1]), d, price, at);
                return 0;
            });
        }
    }
    {
        const auto file = dir / "cfd.csv";
        for (const auto& row : read_csv(file, kCfdHeader)) {
            const auto at = where(file, row.line);
            const Date d = row_date(row.fields[0], at);
            const double price = parse_number(row.fields[3], at);
            with_location(at, [&] {
                builder.add_cfd(row.fields[1], parse_horizon(row.fields[2]), d, price, at);
                return 0;
            });
        }
    }

    const auto reservoir_file = dir / "reservoir.csv";
    const auto wa_file = dir / "wa.csv";
    if (fs::exists(reservoir_file) && fs::exists(wa_file)) {
        throw Error("market.ambiguous_reservoir", "both reservoir.csv and wa.csv present; keep one");
    }
    if (fs::exists(wa_file)) {
        for (const auto& row : read_csv(wa_file, kWaHeader)) {
            const auto at = where(wa_file, row.line);
            const Date d = row_date(row.fields[0], at);
            const double value = parse_number(row.fields[2], at);
            with_location(at, [&] {
                builder.add_reservoir_deviation(row.fields[1], d, value, at);
                return 0;
            });
        }
    }

    std::vector<Diagnostic> diagnostics;
    if (!fs::exists(reservoir_file)) {
        return {std::move(builder).build(&diagnostics, options.strict), std::move(diagnostics)};
    }

    std::vector<ReservoirObservation> readings;
    for (const auto& row : read_csv(reservoir_file, kReservoirHeader)) {
        const auto at = where(reservoir_file, row.line);
        const double fill = parse_number(row.fields[2], at);
        if (!(fill > 0.0 && fill < 100.0)) {
            throw Error("market.malformed_row", fmt::format("{}: fill_pct {} outside (0, 100)", at, fill));
        }
        readings.push_back({row.fields[1], row_date(row.fields[0], at), fill});
    }
    std::vector<ReservoirMapping> mapping;
    if (const auto file = dir / "reservoir_map.csv"; fs::exists(file)) {
        for (const auto& row : read_csv(file, kMapHeader)) {
            const auto at = where(file, row.line);
            mapping.push_back({row.fields[0], row_date(row.fields[1], at), row.fields[2]});
        }
    }

    // The calendar is only known once spot rows are in; build a provisional
    // panel to get it, then attach the deviations.
    PanelBuilder probe = builder;
    const auto calendar = std::move(probe).build(nullptr, false).dates();
    for (const auto& [area, series] : reservoir_deviations(readings, areas, mapping, calendar)) {
        for (std::size_t i = 0; i < calendar.size(); ++i) {
            if (!is_missing(series[i])) {
                builder.add_reservoir_deviation(area, calendar[i], series[i]);
            }
        }
    }
    return {std::move(builder).build(&diagnostics, options.strict), std::move(diagnostics)};
}

void export_panel(const MarketPanel& panel, const fs::path& dir) {
    if (fs::exists(dir / "reservoir.csv")) {
        throw Error("market.ambiguous_reservoir",
                    fmt::format("{} holds raw reservoir data; export into a fresh directory", dir.string()));
    }
    fs::create_directories(dir);
    auto open = [&](std::string_view name, std::string_view header) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("market.write_failed", fmt::format("cannot write {}", (dir / name).string()));
        }
        out << header << '\n';
        return out;
    };
    const auto& dates = panel.dates();

    {
        auto out = open("areas.csv", "area,has_hydro,observed_cfd");
        for (const auto& a : panel.areas()) {
            out << fmt::format("{},{},{}\n", a.code, a.has_hydro, a.observed_cfd);
        }
    }
    {
        auto out = open("redefinitions.csv", "date");
        for (const Date d : panel.redefinitions()) {
            out << format_date(d) << '\n';
        }
    }
    {
        auto out = open("spot.csv", "date,area,price");
        for (std::size_t i = 0; i < dates.size(); ++i) {
            const auto day = format_date(dates[i]);
            out << fmt::format("{},SYS,{}\n", day, panel.system_spot()[i]);
            for (const auto& a : panel.areas()) {
                const double v = panel.area_spot(a.code)[i];
                if (!is_missing(v)) {
                    out << fmt::format("{},{},{}\n", day, a.code, v);
                }
            }
        }
    }
    {
        auto out = open("forward.csv", "date,horizon,price");
        const auto horizons = panel.horizons();
        for (std::size_t i = 0; i < dates.size(); ++i) {
            for (const Horizon h : horizons) {
                const double v = panel.forward(h)[i];
                if (!is_missing(v)) {
                    out << fmt::format("{},{},{}\n", format_date(dates[i]), to_string(h), v);
                }
            }
        }
    }
    {
        auto out = open("cfd.csv", "date,area,horizon,price");
        for (std::size_t i = 0; i < dates.size(); ++i) {
            for (const auto& a : panel.areas()) {
                for (const Horizon h : kAllHorizons) {
                    const Series* s = panel.cfd(a.code, h);
                    if (s != nullptr && !is_missing((*s)[i])) {
                        out << fmt::format("{},{},{},{}\n", format_date(dates[i]), a.code, to_string(h), (*s)[i]);
                    }
                }
            }
        }
    }
    {
        auto out = open("wa.csv", "date,area,wa");
        for (std::size_t i = 0; i < dates.size(); ++i) {
            for (const auto& a : panel.areas()) {
                const Series* s = panel.reservoir_deviation(a.code);
                if (s != nullptr && !is_missing((*s)[i])) {
                    out << fmt::format("{},{},{}\n", format_date(dates[i]), a.code, (*s)[i]);
                }
            }
        }
    }
}

}  // namespace areacfd::market
