#pragma once

#include "areacfd/market_data.hpp"
#include "areacfd/posterior.hpp"

#include <iosfwd>
#include <span>

namespace areacfd::service {

/// Coefficient table, one block per (horizon, epoch): rows beta_SA,
/// beta_SS, beta_FW, beta_WA and one column per observed area. Values are
/// rounded to three decimals; "NA" where an area has no such coefficient.
///
/// CSV columns: horizon, epoch, coefficient, <observed areas...>.
void write_coefficient_csv(std::span<const posterior::PosteriorSummary> summaries,
                           const market::MarketPanel& panel, std::ostream& out);

/// Same content, aligned for a terminal.
void print_coefficient_table(std::span<const posterior::PosteriorSummary> summaries,
                             const market::MarketPanel& panel, std::ostream& out);

}  // namespace areacfd::service
