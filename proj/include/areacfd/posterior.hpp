#pragma once

#include "areacfd/market_data.hpp"
#include "areacfd/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace areacfd::posterior {

/// Sufficient statistics of a no-intercept Gaussian linear regression under
/// the flat prior on (beta, log sigma).
///
/// Given the data, sigma^2 ~ dof * s2 / chi^2(dof) and
/// beta | sigma^2 ~ N(beta_hat, sigma^2 * xtx_inv).
struct PosteriorSummary {
    Eigen::VectorXd beta_hat;
    Eigen::MatrixXd xtx_inv;
    double s2 = 0.0;
    int dof = 0;

    std::vector<market::Covariate> covariates;
    std::string area;
    market::Horizon horizon = market::Horizon::M1;
    std::string epoch;  // Epoch::id() of the fitting window

    Eigen::Index size() const { return beta_hat.size(); }

    /// Position of a covariate in beta_hat, or -1.
    Eigen::Index index_of(market::Covariate c) const;
};

struct PosteriorDraw {
    Eigen::VectorXd beta;
    double sigma2 = 0.0;
};

struct FitOptions {
    /// Largest accepted condition number of the design matrix.
    double max_condition = 1e10;
};

/// Least-squares fit. Requires n > p and a well-conditioned X.
PosteriorSummary fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitOptions& options = {});

/// Fit for one area, horizon and definition period, labels filled in.
PosteriorSummary fit_area(const market::MarketPanel& panel, std::string_view area, market::Horizon horizon,
                          const market::Epoch& epoch, bool drop_stale = false, const FitOptions& options = {});

/// Draws from a fixed posterior. Holds the Cholesky factor of xtx_inv so
/// repeated draws cost O(p^2).
class Sampler {
public:
    explicit Sampler(const PosteriorSummary& summary);

    Eigen::Index size() const { return beta_hat_.size(); }

    PosteriorDraw draw(RandomEngine& rng) const;

    /// Draw into preallocated storage.
    void draw(RandomEngine& rng, Eigen::Ref<Eigen::VectorXd> beta, double& sigma2) const;

private:
    Eigen::VectorXd beta_hat_;
    Eigen::MatrixXd chol_;  // lower factor of xtx_inv
    double s2_;
    int dof_;
};

/// n i.i.d. draws of (beta, sigma^2), reproducible for a given seed.
std::vector<PosteriorDraw> sample(const PosteriorSummary& summary, std::size_t n_draws, std::uint64_t seed);

}  // namespace areacfd::posterior
