#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace areacfd::seasonal {

/// Intercept plus two sine/cosine harmonics on the logit fill scale.
struct SeasonalModel {
    std::string area;
    double gamma0 = 0.0;
    std::array<double, 2> gamma_sin{};  // harmonics j = 1, 2
    std::array<double, 2> gamma_cos{};
    double period = 52.0;  // in time-index units (weeks)

    /// Seasonal level at time index t.
    double evaluate(double t) const;
};

struct FillObservation {
    double t;         // time index, weeks
    double fill_pct;  // strictly inside (0, 100)
};

/// ln(p / (1 - p)) with p = fill_pct / 100. Throws seasonal.domain outside (0, 100).
double logit_fill(double fill_pct);

/// Ordinary least squares fit of the seasonal model to logit fill levels.
/// Needs at least five observations spanning the harmonics.
SeasonalModel fit_seasonal(std::span<const FillObservation> series, double period = 52.0, std::string area = {});

/// logit(fill) minus the seasonal level, per observation.
std::vector<double> adjust(std::span<const FillObservation> series, const SeasonalModel& model);

}  // namespace areacfd::seasonal
