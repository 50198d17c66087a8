#include "areacfd/service/config.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

namespace areacfd::service {

void JobConfig::validate() const {
    namespace fs = std::filesystem;
    if (data_dir.empty() || !fs::is_directory(data_dir)) {
        throw Error("config.invalid", fmt::format("data directory '{}' does not exist", data_dir.string()));
    }
    if (const auto areas = areas_file.value_or(data_dir / "areas.csv"); !fs::exists(areas)) {
        throw Error("config.invalid", fmt::format("areas file '{}' does not exist", areas.string()));
    }
    if (posteriors_file && !fs::exists(*posteriors_file)) {
        throw Error("config.invalid", fmt::format("posteriors file '{}' does not exist", posteriors_file->string()));
    }
    if (n_draws < 1) {
        throw Error("config.invalid", "N must be at least 1");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0) || (i > 0 && !(levels[i] > levels[i - 1]))) {
            throw Error("config.invalid", "quantile levels must be strictly increasing in (0, 1)");
        }
    }
    if (!(days_per_month > 0.0)) {
        throw Error("config.invalid", "days per month must be positive");
    }
}

forecast::ForecastOptions JobConfig::forecast_options() const {
    forecast::ForecastOptions o;
    o.n_draws = n_draws;
    o.seed = seed;
    o.levels = levels;
    o.days_per_month = days_per_month;
    o.noise = noise;
    o.threads = threads;
    return o;
}

}  // namespace areacfd::service
