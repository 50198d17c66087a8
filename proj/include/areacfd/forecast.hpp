#pragma once

#include "areacfd/elicitation.hpp"
#include "areacfd/market_data.hpp"
#include "areacfd/posterior.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace areacfd::forecast {

struct ForecastOptions {
    std::size_t n_draws = 10000;
    std::uint64_t seed = 0;
    std::vector<double> levels{0.025, 0.5, 0.975};
    double days_per_month = elicitation::kDefaultDaysPerMonth;

    /// Add N(0, sigma^2) noise to each draw, with sigma^2 the rho-weighted
    /// average of the observed areas' sigma^2 draws. Off by default: the
    /// band then describes the predicted mean CfD.
    bool noise = false;

    bool keep_draws = false;
    unsigned threads = 1;  // 0 picks std::thread::hardware_concurrency()
    std::optional<DateRange> window;
};

struct DayForecast {
    Date date;
    std::string epoch;
    double mean = 0.0;
    std::vector<double> quantiles;  // one per level
    std::vector<double> draws;      // iteration order; empty unless kept
};

/// Everything that, together with the panel and posteriors, fixes a result.
struct Provenance {
    std::string profile_hash;
    std::vector<std::string> epochs;
    std::uint64_t seed = 0;
    std::size_t n_draws = 0;
    double days_per_month = 0.0;
    bool noise = false;
};

struct ForecastResult {
    std::string target;
    market::Horizon horizon = market::Horizon::M1;
    std::vector<double> levels;
    std::size_t n_draws = 0;
    std::vector<DayForecast> days;
    Provenance provenance;
};

/// Nearest-rank empirical quantile: the ceil(level * n)-th smallest value.
double nearest_rank(std::span<const double> sorted, double level);

/// Monte Carlo predictive distribution of the mean CfD of `profile.target`.
///
/// Each iteration draws one weight vector per covariate from the profile
/// and, per definition period, one coefficient vector per weighted observed
/// area; the target's coefficient for covariate j is the weighted sum of the
/// observed areas' j-th coefficients. All days of an iteration share these
/// draws. Iteration i uses substream (seed, i), so results do not depend on
/// the number of threads.
ForecastResult run_forecast(const market::MarketPanel& panel, std::span<const posterior::PosteriorSummary> posteriors,
                            const elicitation::ElicitationProfile& profile, market::Horizon horizon,
                            const ForecastOptions& options);

/// Columns: date, mean, one q<percent> per level, n_draws.
void write_csv(const ForecastResult& result, std::ostream& out);

}  // namespace areacfd::forecast
