#include "areacfd/posterior.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace areacfd::posterior {

Eigen::Index PosteriorSummary::index_of(market::Covariate c) const {
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        if (covariates[i] == c) {
            return static_cast<Eigen::Index>(i);
        }
    }
    return -1;
}

PosteriorSummary fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitOptions& options) {
    const auto n = x.rows();
    const auto p = x.cols();
    if (y.size() != n) {
        throw Error("posterior.shape", fmt::format("X has {} rows but y has {}", n, y.size()));
    }
    if (p == 0 || n <= p) {
        throw Error("posterior.too_few_rows", fmt::format("need more rows than columns, got n={} p={}", n, p));
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    const double condition = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
    if (!(condition <= options.max_condition)) {
        throw Error("posterior.rank_deficient",
                    fmt::format("design condition number {:.3g} exceeds {:.3g}; covariates are collinear",
                                condition, options.max_condition));
    }

    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::LLT<Eigen::MatrixXd> llt(xtx);
    if (llt.info() != Eigen::Success) {
        throw Error("posterior.rank_deficient", "X'X is not positive definite");
    }

    PosteriorSummary s;
    s.beta_hat = llt.solve(x.transpose() * y);
    s.xtx_inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
    s.xtx_inv = 0.5 * (s.xtx_inv + s.xtx_inv.transpose()).eval();
    s.dof = static_cast<int>(n - p);
    s.s2 = (y - x * s.beta_hat).squaredNorm() / s.dof;
    return s;
}

PosteriorSummary fit_area(const market::MarketPanel& panel, std::string_view area, market::Horizon horizon,
                          const market::Epoch& epoch, bool drop_stale, const FitOptions& options) {
    const auto data = market::regression_data(panel, area, horizon, epoch.range, drop_stale);
    PosteriorSummary s = [&] {
        try {
            return fit(data.design.x, data.y, options);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("{} {} epoch {}: {}", area, market::to_string(horizon), epoch.id(),
                                              e.what()));
        }
    }();
    s.covariates = data.design.columns;
    s.area = std::string(area);
    s.horizon = horizon;
    s.epoch = epoch.id();
    return s;
}

Sampler::Sampler(const PosteriorSummary& summary)
    : beta_hat_(summary.beta_hat), s2_(summary.s2), dof_(summary.dof) {
    if (dof_ < 1 || !(s2_ >= 0.0)) {
        throw Error("posterior.invalid_summary", fmt::format("need dof >= 1 and s2 >= 0, got {} and {}", dof_, s2_));
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(summary.xtx_inv);
    if (llt.info() != Eigen::Success) {
        throw Error("posterior.invalid_summary", "xtx_inv is not positive definite");
    }
    chol_ = llt.matrixL();
}

void Sampler::draw(RandomEngine& rng, Eigen::Ref<Eigen::VectorXd> beta, double& sigma2) const {
    if (s2_ == 0.0) {
        sigma2 = 0.0;
        beta = beta_hat_;
        return;
    }
    std::chi_squared_distribution<double> chi2(dof_);
    sigma2 = dof_ * s2_ / chi2(rng);

    std::normal_distribution<double> normal;
    Eigen::VectorXd z(beta_hat_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = normal(rng);
    }
    beta = beta_hat_ + std::sqrt(sigma2) * (chol_ * z);
}

PosteriorDraw Sampler::draw(RandomEngine& rng) const {
    PosteriorDraw d;
    d.beta.resize(beta_hat_.size());
    draw(rng, d.beta, d.sigma2);
    return d;
}

std::vector<PosteriorDraw> sample(const PosteriorSummary& summary, std::size_t n_draws, std::uint64_t seed) {
    if (n_draws < 1) {
        throw Error("posterior.no_draws", "n_draws must be at least 1");
    }
    const Sampler sampler(summary);
    auto rng = make_stream(seed);
    std::vector<PosteriorDraw> draws;
    draws.reserve(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
        draws.push_back(sampler.draw(rng));
    }
    return draws;
}

}  // namespace areacfd::posterior
