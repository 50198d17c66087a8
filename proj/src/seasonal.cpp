#include "areacfd/seasonal.hpp"

#include "areacfd/error.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace areacfd::seasonal {

namespace {

constexpr int kCoefficients = 5;

// Columns: 1, sin(wt), sin(2wt), cos(wt), cos(2wt) with w = 2*pi/period.
void basis(double t, double period, double* row) {
    const double w = 2.0 * std::numbers::pi * t / period;
    row[0] = 1.0;
    row[1] = std::sin(w);
    row[2] = std::sin(2.0 * w);
    row[3] = std::cos(w);
    row[4] = std::cos(2.0 * w);
}

}  // namespace

double SeasonalModel::evaluate(double t) const {
    double row[kCoefficients];
    basis(t, period, row);
    return gamma0 * row[0] + gamma_sin[0] * row[1] + gamma_sin[1] * row[2] + gamma_cos[0] * row[3] +
           gamma_cos[1] * row[4];
}

double logit_fill(double fill_pct) {
    if (!(fill_pct > 0.0 && fill_pct < 100.0)) {
        throw Error("seasonal.domain", fmt::format("reservoir fill {} outside (0, 100)", fill_pct));
    }
    const double p = fill_pct / 100.0;
    return std::log(p / (1.0 - p));
}

SeasonalModel fit_seasonal(std::span<const FillObservation> series, double period, std::string area) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw Error("seasonal.bad_period", fmt::format("period must be positive, got {}", period));
    }
    if (series.size() < kCoefficients) {
        throw Error("seasonal.rank_deficient",
                    fmt::format("{} observations for {} coefficients", series.size(), kCoefficients));
    }

    const auto n = static_cast<Eigen::Index>(series.size());
    Eigen::Matrix<double, Eigen::Dynamic, kCoefficients, Eigen::RowMajor> design(n, kCoefficients);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        basis(series[i].t, period, design.row(i).data());
        y(i) = logit_fill(series[i].fill_pct);
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < kCoefficients) {
        throw Error("seasonal.rank_deficient", "observation times do not identify both harmonics");
    }
    const Eigen::VectorXd gamma = qr.solve(y);

    SeasonalModel model;
    model.area = std::move(area);
    model.period = period;
    model.gamma0 = gamma(0);
    model.gamma_sin = {gamma(1), gamma(2)};
    model.gamma_cos = {gamma(3), gamma(4)};
    return model;
}

std::vector<double> adjust(std::span<const FillObservation> series, const SeasonalModel& model) {
    std::vector<double> residuals;
    residuals.reserve(series.size());
    for (const auto& obs : series) {
        residuals.push_back(logit_fill(obs.fill_pct) - model.evaluate(obs.t));
    }
    return residuals;
}

}  // namespace areacfd::seasonal
