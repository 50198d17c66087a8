#pragma once

#include "areacfd/backtest.hpp"
#include "areacfd/forecast.hpp"
#include "areacfd/market_data.hpp"
#include "areacfd/posterior.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace areacfd::service {

/// Canonical record: labels, beta_hat, row-major upper triangle of xtx_inv
/// (diagonal included), s2 and dof.
nlohmann::json to_json(const posterior::PosteriorSummary& s);
posterior::PosteriorSummary posterior_from_json(const nlohmann::json& doc);

void save_posteriors(const std::vector<posterior::PosteriorSummary>& summaries, const std::filesystem::path& file);
std::vector<posterior::PosteriorSummary> load_posteriors(const std::filesystem::path& file);

/// Raw draws are included only when `max_draws` > 0, capped at that many
/// numbers in total; "draws_truncated" reports whether the cap cut them.
nlohmann::json to_json(const forecast::ForecastResult& r, std::size_t max_draws = 0);

nlohmann::json to_json(const forecast::BacktestRecord& r);

nlohmann::json areas_json(const market::MarketPanel& panel);
nlohmann::json panel_summary(const market::MarketPanel& panel, std::size_t diagnostics);

}  // namespace areacfd::service
