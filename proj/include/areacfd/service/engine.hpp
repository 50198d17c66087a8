#pragma once

#include "areacfd/backtest.hpp"
#include "areacfd/forecast.hpp"
#include "areacfd/market_data.hpp"
#include "areacfd/posterior.hpp"
#include "areacfd/service/config.hpp"
#include "areacfd/service/profile_store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace areacfd::service {

struct FitFailure {
    std::string area;
    market::Horizon horizon;
    std::string epoch;
    std::string code;
    std::string message;
};

/// Posterior summaries for every observed area, horizon and definition
/// period. Periods that cannot be fitted are reported, not fatal.
std::vector<posterior::PosteriorSummary> fit_all(const market::MarketPanel& panel,
                                                 const std::vector<market::Horizon>& horizons, bool drop_stale,
                                                 std::vector<FitFailure>* failures = nullptr);

/// Loaded panel and fitted posteriors for one job, plus the profile store.
/// Panel and posteriors are read-only after construction.
class Engine {
public:
    explicit Engine(JobConfig config);

    const JobConfig& config() const { return config_; }
    const market::MarketPanel& panel() const { return panel_; }
    const std::vector<market::Diagnostic>& diagnostics() const { return diagnostics_; }
    const std::vector<posterior::PosteriorSummary>& posteriors() const { return posteriors_; }
    const std::vector<FitFailure>& fit_failures() const { return failures_; }
    const std::vector<market::Horizon>& horizons() const { return horizons_; }

    std::vector<posterior::PosteriorSummary> posteriors_for(const std::optional<std::string>& area,
                                                            const std::optional<market::Horizon>& horizon) const;

    ProfileStore& profiles() { return store_; }
    const ProfileStore& profiles() const { return store_; }

    /// Forecast with the stored profile of `target`; throws
    /// forecast.no_profile when none is stored.
    forecast::ForecastResult forecast(const std::string& target, market::Horizon horizon,
                                      const forecast::ForecastOptions& options) const;

    /// Observed areas use their quoted CfDs; others use forecast means from
    /// their stored profile.
    std::vector<forecast::BacktestRecord> backtest(const std::string& area, market::Horizon horizon,
                                                   const forecast::ForecastOptions& options,
                                                   std::vector<market::Diagnostic>* diagnostics = nullptr) const;

private:
    JobConfig config_;
    std::vector<market::Diagnostic> diagnostics_;  // filled while panel_ loads
    market::MarketPanel panel_;
    std::vector<market::Horizon> horizons_;
    std::vector<posterior::PosteriorSummary> posteriors_;
    std::vector<FitFailure> failures_;
    ProfileStore store_;
};

}  // namespace areacfd::service
