#include "areacfd/synthetic.hpp"

#include "areacfd/error.hpp"
#include "areacfd/random.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>

namespace areacfd::synthetic {

using market::AreaInfo;
using market::Horizon;

std::vector<AreaInfo> nordic_areas() {
    return {{"DK1", false, true}, {"DK2", false, true}, {"FI", true, true},  {"NO1", true, true}, {"NO2", true, false},
            {"NO3", true, false}, {"NO4", true, false}, {"NO5", true, false}, {"SE", true, true}};
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path, std::string_view header) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("synthetic.write_failed", fmt::format("cannot write {}", path.string()));
    }
    out << header << '\n';
    return out;
}

}  // namespace

Fixture write_fixture(const std::filesystem::path& dir, const FixtureOptions& options) {
    std::filesystem::create_directories(dir);
    auto rng = make_stream(options.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    auto n01 = [&] {
        normal.reset();
        return normal(rng);
    };

    Fixture fixture;
    fixture.areas = nordic_areas();
    const auto& areas = fixture.areas;

    std::vector<Date> calendar;
    for (Date d = options.first; d <= options.last; d += std::chrono::days{1}) {
        calendar.push_back(d);
    }
    const std::size_t n = calendar.size();

    // System spot: annual cycle plus persistent shocks.
    std::vector<double> ss(n);
    double shock = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        shock = 0.95 * shock + 2.0 * n01();
        ss[t] = 40.0 + 8.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 365.25) + shock;
    }

    std::map<std::string, std::vector<double>> sa;
    for (std::size_t a = 0; a < areas.size(); ++a) {
        const double offset = -3.0 + 6.0 * uniform(rng);
        double spread = 0.0;
        auto& s = sa[areas[a].code];
        s.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            spread = 0.9 * spread + 1.5 * n01();
            s[t] = ss[t] + offset + spread;
        }
    }

    // Weekly reservoir readings on Mondays.
    std::vector<market::ReservoirObservation> readings;
    for (const auto& a : areas) {
        if (!a.has_hydro) {
            continue;
        }
        const double base = -0.4 + 0.8 * uniform(rng);
        double anomaly = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (std::chrono::weekday{calendar[t]} != std::chrono::Monday) {
                continue;
            }
            const double week = static_cast<double>(t) / 7.0;
            anomaly = 0.9 * anomaly + 0.1 * n01();
            const double logit = base + 1.2 * std::sin(2.0 * std::numbers::pi * week / 52.0) +
                                 0.3 * std::cos(4.0 * std::numbers::pi * week / 52.0) + anomaly;
            const double fill = std::round(10000.0 / (1.0 + std::exp(-logit))) / 100.0;
            readings.push_back({a.code, calendar[t], std::clamp(fill, 0.5, 99.5)});
        }
    }
    const auto wa = market::reservoir_deviations(readings, areas, {}, calendar);

    std::map<Horizon, std::vector<double>> fw;
    for (const Horizon h : options.horizons) {
        const double premium = 0.5 * static_cast<double>(static_cast<int>(h));
        double level = 0.0;
        auto& f = fw[h];
        f.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            level = 0.97 * level + 1.0 * n01();
            f[t] = 0.7 * ss[t] + 12.0 + premium + level;
        }
    }

    {
        auto out = open_csv(dir / "areas.csv", "area,has_hydro,observed_cfd");
        for (const auto& a : areas) {
            out << fmt::format("{},{},{}\n", a.code, a.has_hydro, a.observed_cfd);
        }
    }
    {
        auto out = open_csv(dir / "redefinitions.csv", "date");
        for (const Date d : options.redefinitions) {
            out << format_date(d) << '\n';
        }
    }
    {
        auto out = open_csv(dir / "spot.csv", "date,area,price");
        for (std::size_t t = 0; t < n; ++t) {
            out << fmt::format("{},SYS,{:.2f}\n", format_date(calendar[t]), ss[t]);
            for (const auto& a : areas) {
                out << fmt::format("{},{},{:.2f}\n", format_date(calendar[t]), a.code, sa[a.code][t]);
            }
        }
    }
    {
        auto out = open_csv(dir / "reservoir.csv", "date,area,fill_pct");
        for (const auto& r : readings) {
            out << fmt::format("{},{},{:.2f}\n", format_date(r.date), r.source, r.fill_pct);
        }
    }
    {
        auto out = open_csv(dir / "forward.csv", "date,horizon,price");
        for (std::size_t t = 0; t < n; ++t) {
            if (is_weekend(calendar[t])) {
                continue;
            }
            for (const Horizon h : options.horizons) {
                out << fmt::format("{},{},{:.2f}\n", format_date(calendar[t]), market::to_string(h), fw[h][t]);
            }
        }
    }

    // Rounded values are what ingestion will see; generate from those.
    auto rounded = [](double v) { return std::round(v * 100.0) / 100.0; };
    auto out = open_csv(dir / "cfd.csv", "date,area,horizon,price");
    std::map<std::pair<std::string, Horizon>, std::vector<double>> cfd;
    for (const auto& a : areas) {
        if (!a.observed_cfd) {
            continue;
        }
        for (const Horizon h : options.horizons) {
            Eigen::VectorXd beta(a.has_hydro ? 4 : 3);
            beta(0) = -0.3 + 0.35 * uniform(rng);
            beta(1) = 0.3 + 0.3 * uniform(rng);
            beta(2) = -beta(1) + 0.1 * (uniform(rng) - 0.5);
            if (a.has_hydro) {
                beta(3) = -1.0 + 2.5 * uniform(rng);
            }
            fixture.true_beta[{a.code, h}] = beta;

            auto& series = cfd[{a.code, h}];
            series.assign(n, market::kMissing);
            double previous = market::kMissing;
            for (std::size_t t = 0; t < n; ++t) {
                if (is_weekend(calendar[t])) {
                    continue;
                }
                const double wa_t = a.has_hydro ? wa.at(a.code)[t] : 0.0;
                if (market::is_missing(wa_t)) {
                    continue;
                }
                double value = beta(0) * rounded(fw[h][t]) + beta(1) * rounded(sa[a.code][t]) +
                               beta(2) * rounded(ss[t]) + (a.has_hydro ? beta(3) * wa_t : 0.0) +
                               options.cfd_noise_sd * n01();
                if (!market::is_missing(previous) && uniform(rng) < options.stale_probability) {
                    value = previous;
                }
                if (!(value > -rounded(fw[h][t]) + 1.0)) {
                    continue;
                }
                series[t] = rounded(value);
                previous = series[t];
            }
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        for (const auto& [key, series] : cfd) {
            if (!market::is_missing(series[t])) {
                out << fmt::format("{},{},{},{:.2f}\n", format_date(calendar[t]), key.first,
                                   market::to_string(key.second), series[t]);
            }
        }
    }
    return fixture;
}

elicitation::ElicitationProfile example_profile(const std::string& target) {
    using market::Covariate;
    elicitation::ElicitationProfile p;
    p.target = target;
    p.observed = {"DK1", "DK2", "FI", "NO1", "SE"};
    p.rows = {{Covariate::FW, {5, 5, 5, 75, 10}, 1.0},
              {Covariate::SA, {5, 5, 5, 80, 5}, 1.0},
              {Covariate::SS, {5, 5, 5, 80, 5}, 1.0},
              {Covariate::WA, {0, 0, 5, 85, 10}, 1.0}};
    return p;
}

}  // namespace areacfd::synthetic
