#pragma once

#include "areacfd/elicitation.hpp"
#include "areacfd/forecast.hpp"
#include "areacfd/market_data.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace areacfd::service {

/// Environment variable that supplies the data directory when --data is absent.
inline constexpr const char* kDataDirEnv = "AREACFD_DATA_DIR";

struct JobConfig {
    std::filesystem::path data_dir;
    std::optional<std::filesystem::path> areas_file;
    std::optional<std::filesystem::path> profile_dir;     // defaults to data_dir/profiles
    std::optional<std::filesystem::path> posteriors_file; // load instead of fitting
    std::vector<market::Horizon> horizons;                // empty: every horizon with forwards

    std::size_t n_draws = 10000;
    std::uint64_t seed = 0;
    std::vector<double> levels{0.025, 0.5, 0.975};
    double days_per_month = elicitation::kDefaultDaysPerMonth;
    bool drop_stale = false;
    bool noise = false;
    bool strict = false;
    unsigned threads = 1;
    std::size_t max_export_draws = 100000;

    std::filesystem::path profiles() const { return profile_dir.value_or(data_dir / "profiles"); }

    /// Throws config.invalid.
    void validate() const;

    forecast::ForecastOptions forecast_options() const;
};

}  // namespace areacfd::service
