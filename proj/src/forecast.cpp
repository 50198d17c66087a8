#include "areacfd/forecast.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

namespace areacfd::forecast {

using market::Covariate;
using posterior::PosteriorSummary;

namespace {

constexpr std::uint64_t kNoiseStreamTag = 0x6e6f697365ULL;

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void check_options(const ForecastOptions& o) {
    if (o.n_draws < 1) {
        throw Error("forecast.bad_options", "number of draws must be at least 1");
    }
    for (std::size_t i = 0; i < o.levels.size(); ++i) {
        const double l = o.levels[i];
        if (!(l > 0.0 && l < 1.0) || (i > 0 && !(l > o.levels[i - 1]))) {
            throw Error("forecast.bad_options", "quantile levels must be strictly increasing in (0, 1)");
        }
    }
    if (!(o.days_per_month > 0.0)) {
        throw Error("forecast.bad_options", "days per month must be positive");
    }
}

// One definition period with target rows to forecast.
struct EpochPlan {
    market::Epoch epoch;
    market::DesignMatrix design;
    std::vector<std::optional<posterior::Sampler>> samplers;  // per observed area; empty when unweighted
    std::vector<std::vector<Eigen::Index>> coef_index;        // [target column][observed area]
};

}  // namespace

double nearest_rank(std::span<const double> sorted, double level) {
    if (sorted.empty()) {
        throw Error("forecast.no_draws", "quantile of an empty sample");
    }
    const double n = static_cast<double>(sorted.size());
    // Guard against level * n landing a rounding error above an integer.
    const double rank = std::ceil(level * n - 1e-9 * std::max(1.0, level * n));
    const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, n));
    return sorted[r - 1];
}

ForecastResult run_forecast(const market::MarketPanel& panel, std::span<const PosteriorSummary> posteriors,
                            const elicitation::ElicitationProfile& profile, market::Horizon horizon,
                            const ForecastOptions& options) {
    check_options(options);
    const std::size_t q = profile.observed.size();
    const std::size_t n_iter = options.n_draws;
    const unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                  : options.threads;

    // Areas with weight on any row; mean weight drives the optional noise mix.
    std::vector<bool> weighted(q, false);
    std::vector<double> noise_mix(q, 0.0);
    for (const auto& row : profile.rows) {
        for (std::size_t k = 0; k < q; ++k) {
            weighted[k] = weighted[k] || row.rho[k] > 0.0;
            noise_mix[k] += row.rho[k] / static_cast<double>(profile.rows.size());
        }
    }

    std::vector<EpochPlan> plans;
    for (const auto& epoch : panel.epochs()) {
        DateRange range = epoch.range;
        if (options.window) {
            range.first = std::max(range.first, options.window->first);
            range.last = std::min(range.last, options.window->last);
            if (range.last < range.first) {
                continue;
            }
        }
        EpochPlan plan{epoch, {}, {}, {}};
        try {
            plan.design = market::design_matrix(panel, profile.target, horizon, range);
        } catch (const Error& e) {
            if (e.code() == "market.insufficient_data") {
                continue;
            }
            throw;
        }

        plan.samplers.resize(q);
        std::vector<const PosteriorSummary*> chosen(q, nullptr);
        for (std::size_t k = 0; k < q; ++k) {
            if (!weighted[k]) {
                continue;
            }
            for (const auto& s : posteriors) {
                if (s.area == profile.observed[k] && s.horizon == horizon && s.epoch == epoch.id()) {
                    chosen[k] = &s;
                    break;
                }
            }
            if (chosen[k] == nullptr) {
                throw Error("forecast.missing_posterior",
                            fmt::format("no {} posterior for {} in epoch {}", market::to_string(horizon),
                                        profile.observed[k], epoch.id()));
            }
            plan.samplers[k].emplace(*chosen[k]);
        }

        for (const Covariate c : plan.design.columns) {
            const auto* row = profile.row(c);
            if (row == nullptr) {
                throw Error("forecast.profile_mismatch",
                            fmt::format("profile for {} has no {} row", profile.target, market::to_string(c)));
            }
            std::vector<Eigen::Index> idx(q, -1);
            for (std::size_t k = 0; k < q; ++k) {
                if (row->rho[k] > 0.0) {
                    idx[k] = chosen[k]->index_of(c);
                    if (idx[k] < 0) {
                        throw Error("forecast.missing_covariate",
                                    fmt::format("{} carries {} weight but its model has no {} coefficient",
                                                profile.observed[k], market::to_string(c), market::to_string(c)));
                    }
                }
            }
            plan.coef_index.push_back(std::move(idx));
        }
        plans.push_back(std::move(plan));
    }
    if (plans.empty()) {
        throw Error("forecast.missing_covariate",
                    fmt::format("no day with complete {} covariates for {}", market::to_string(horizon),
                                profile.target));
    }

    // Row index in the profile for each target column, per plan (same for all).
    std::vector<std::size_t> profile_row;
    for (const Covariate c : plans.front().design.columns) {
        profile_row.push_back(static_cast<std::size_t>(profile.row(c) - profile.rows.data()));
    }

    const std::size_t n_epochs = plans.size();
    const std::size_t p = plans.front().design.columns.size();
    std::vector<double> combined(n_iter * n_epochs * p);
    std::vector<double> sigma2_mix(n_iter * n_epochs);

    const elicitation::WeightSampler weight_sampler(profile, options.days_per_month);
    parallel_for(n_iter, threads, [&](std::size_t begin, std::size_t end) {
        elicitation::WeightDraw weights;
        std::vector<Eigen::VectorXd> beta(q);
        std::vector<double> sigma2(q, 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            auto rng = make_stream(options.seed, {i});
            weight_sampler.draw(rng, weights);
            for (std::size_t e = 0; e < n_epochs; ++e) {
                const auto& plan = plans[e];
                for (std::size_t k = 0; k < q; ++k) {
                    if (plan.samplers[k]) {
                        const auto& sampler = *plan.samplers[k];
                        beta[k].resize(sampler.size());
                        sampler.draw(rng, beta[k], sigma2[k]);
                    }
                }
                double* out = &combined[(i * n_epochs + e) * p];
                for (std::size_t j = 0; j < p; ++j) {
                    const auto& w = weights.rows[profile_row[j]];
                    double acc = 0.0;
                    for (std::size_t k = 0; k < q; ++k) {
                        if (w[k] > 0.0) {
                            acc += w[k] * beta[k](plan.coef_index[j][k]);
                        }
                    }
                    out[j] = acc;
                }
                double mix = 0.0;
                for (std::size_t k = 0; k < q; ++k) {
                    if (noise_mix[k] > 0.0) {
                        mix += noise_mix[k] * sigma2[k];
                    }
                }
                sigma2_mix[i * n_epochs + e] = mix;
            }
        }
    });

    // Flatten days across periods, then evaluate every day independently.
    struct DayRef {
        std::size_t plan;
        Eigen::Index row;
    };
    std::vector<DayRef> refs;
    for (std::size_t e = 0; e < n_epochs; ++e) {
        for (Eigen::Index r = 0; r < plans[e].design.x.rows(); ++r) {
            refs.push_back({e, r});
        }
    }

    ForecastResult result;
    result.target = profile.target;
    result.horizon = horizon;
    result.levels = options.levels;
    result.n_draws = n_iter;
    result.days.resize(refs.size());

    parallel_for(refs.size(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> values(n_iter);
        std::vector<double> sorted(n_iter);
        for (std::size_t d = begin; d < end; ++d) {
            const auto& plan = plans[refs[d].plan];
            const auto x = plan.design.x.row(refs[d].row);
            const Date date = plan.design.dates[static_cast<std::size_t>(refs[d].row)];
            std::optional<RandomEngine> noise_rng;
            std::normal_distribution<double> normal;
            if (options.noise) {
                noise_rng = make_stream(options.seed,
                                        {kNoiseStreamTag, static_cast<std::uint64_t>(date.time_since_epoch().count())});
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < n_iter; ++i) {
                const double* b = &combined[(i * n_epochs + refs[d].plan) * p];
                double mu = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    mu += b[j] * x(static_cast<Eigen::Index>(j));
                }
                if (noise_rng) {
                    normal.reset();
                    mu += std::sqrt(sigma2_mix[i * n_epochs + refs[d].plan]) * normal(*noise_rng);
                }
                values[i] = mu;
                sum += mu;
            }
            auto& day = result.days[d];
            day.date = date;
            day.epoch = plan.epoch.id();
            day.mean = sum / static_cast<double>(n_iter);
            std::copy(values.begin(), values.end(), sorted.begin());
            std::sort(sorted.begin(), sorted.end());
            for (const double level : options.levels) {
                day.quantiles.push_back(nearest_rank(sorted, level));
            }
            if (options.keep_draws) {
                day.draws = values;
            }
        }
    });

    result.provenance.profile_hash = elicitation::profile_hash(profile);
    for (const auto& plan : plans) {
        result.provenance.epochs.push_back(plan.epoch.id());
    }
    result.provenance.seed = options.seed;
    result.provenance.n_draws = n_iter;
    result.provenance.days_per_month = options.days_per_month;
    result.provenance.noise = options.noise;
    return result;
}

void write_csv(const ForecastResult& result, std::ostream& out) {
    out << "date,mean";
    for (const double l : result.levels) {
        out << fmt::format(",q{:g}", l * 100.0);
    }
    out << ",n_draws\n";
    for (const auto& d : result.days) {
        out << format_date(d.date) << ',' << fmt::format("{}", d.mean);
        for (const double v : d.quantiles) {
            out << ',' << fmt::format("{}", v);
        }
        out << ',' << result.n_draws << '\n';
    }
}

}  // namespace areacfd::forecast
