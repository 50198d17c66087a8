#include "areacfd/service/engine.hpp"

#include "areacfd/error.hpp"
#include "areacfd/service/json_io.hpp"

#include <fmt/format.h>

namespace areacfd::service {

std::vector<posterior::PosteriorSummary> fit_all(const market::MarketPanel& panel,
                                                 const std::vector<market::Horizon>& horizons, bool drop_stale,
                                                 std::vector<FitFailure>* failures) {
    std::vector<posterior::PosteriorSummary> out;
    for (const auto h : horizons) {
        for (const auto& area : panel.areas()) {
            if (!area.observed_cfd) {
                continue;
            }
            for (const auto& epoch : panel.epochs()) {
                try {
                    out.push_back(posterior::fit_area(panel, area.code, h, epoch, drop_stale));
                } catch (const Error& e) {
                    if (failures != nullptr) {
                        failures->push_back({area.code, h, epoch.id(), e.code(), e.what()});
                    }
                }
            }
        }
    }
    return out;
}

namespace {

market::MarketPanel load_panel(const JobConfig& config, std::vector<market::Diagnostic>& diagnostics) {
    config.validate();
    market::IngestOptions options;
    options.strict = config.strict;
    options.areas_file = config.areas_file;
    auto result = market::ingest(config.data_dir, options);
    diagnostics = std::move(result.diagnostics);
    return std::move(result.panel);
}

}  // namespace

Engine::Engine(JobConfig config)
    : config_(std::move(config)), panel_(load_panel(config_, diagnostics_)), store_(config_.profiles()) {
    horizons_ = config_.horizons.empty() ? panel_.horizons() : config_.horizons;
    if (config_.posteriors_file) {
        posteriors_ = load_posteriors(*config_.posteriors_file);
    } else {
        posteriors_ = fit_all(panel_, horizons_, config_.drop_stale, &failures_);
    }
}

std::vector<posterior::PosteriorSummary> Engine::posteriors_for(const std::optional<std::string>& area,
                                                                const std::optional<market::Horizon>& horizon) const {
    if (area) {
        panel_.area(*area);
    }
    std::vector<posterior::PosteriorSummary> out;
    for (const auto& s : posteriors_) {
        if ((!area || s.area == *area) && (!horizon || s.horizon == *horizon)) {
            out.push_back(s);
        }
    }
    return out;
}

forecast::ForecastResult Engine::forecast(const std::string& target, market::Horizon horizon,
                                          const forecast::ForecastOptions& options) const {
    panel_.area(target);
    const auto stored = store_.get(target);
    if (!stored) {
        throw Error("forecast.no_profile", fmt::format("no elicitation profile stored for {}", target));
    }
    return forecast::run_forecast(panel_, posteriors_, stored->profile, horizon, options);
}

std::vector<forecast::BacktestRecord> Engine::backtest(const std::string& area, market::Horizon horizon,
                                                       const forecast::ForecastOptions& options,
                                                       std::vector<market::Diagnostic>* diagnostics) const {
    const auto& info = panel_.area(area);
    const auto quotes = info.observed_cfd ? forecast::observed_quotes(panel_, area, horizon)
                                          : forecast::predicted_quotes(forecast(area, horizon, options));
    return forecast::backtest(panel_, area, horizon, quotes, diagnostics);
}

}  // namespace areacfd::service
