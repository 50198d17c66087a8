#pragma once

#include "areacfd/date.hpp"
#include "areacfd/elicitation.hpp"
#include "areacfd/market_data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace areacfd::synthetic {

/// FI, DK1, DK2, SE and NO1-NO5, alphabetical; CfDs observed outside NO2-NO5.
std::vector<market::AreaInfo> nordic_areas();

struct FixtureOptions {
    Date first = parse_date("2008-01-01");
    Date last = parse_date("2011-01-31");
    std::vector<Date> redefinitions{parse_date("2008-11-17"), parse_date("2010-03-15")};
    std::vector<market::Horizon> horizons{market::Horizon::M1, market::Horizon::Q1, market::Horizon::Y1};
    std::uint64_t seed = 1;
    double cfd_noise_sd = 0.5;
    double stale_probability = 0.05;
};

struct Fixture {
    std::vector<market::AreaInfo> areas;
    /// Coefficients used to generate each observed CfD series, in
    /// covariates_for(has_hydro) order.
    std::map<std::pair<std::string, market::Horizon>, Eigen::VectorXd> true_beta;
};

/// Writes a raw input directory (areas, spot, forward, cfd, reservoir and
/// redefinitions CSVs) with CfDs generated from the linear model.
Fixture write_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

/// Raw judgement for a Norwegian area against DK1, DK2, FI, NO1 and SE,
/// leaning on NO1 and one month of confidence per row. Not normalized.
elicitation::ElicitationProfile example_profile(const std::string& target = "NO2");

}  // namespace areacfd::synthetic
