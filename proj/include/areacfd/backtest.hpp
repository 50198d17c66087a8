#pragma once

#include "areacfd/forecast.hpp"
#include "areacfd/market_data.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace areacfd::forecast {

/// Delivery window of a contract quoted on `quote_date`: the next one or
/// two calendar months (M1, M2), the next one to three full quarters
/// (Q1..Q3) or full years (Y1..Y3) after the quote's own month, quarter or
/// year.
DateRange delivery_period(Date quote_date, market::Horizon horizon);

/// CfD quotes per day, observed or predicted (forecast means).
struct QuoteSeries {
    std::vector<Date> dates;
    std::vector<double> cfd;
    bool predicted = false;
};

QuoteSeries observed_quotes(const market::MarketPanel& panel, std::string_view area, market::Horizon horizon);
QuoteSeries predicted_quotes(const ForecastResult& result);

/// One delivery period: the last quote before delivery against the realised
/// average area spot. difference = cfd + fw - realised.
struct BacktestRecord {
    std::string area;
    market::Horizon horizon = market::Horizon::M1;
    DateRange period;
    Date quote_date;
    double cfd = 0.0;
    double fw = 0.0;
    double realised = 0.0;
    std::size_t spot_days = 0;
    bool predicted = false;

    double quote() const { return cfd + fw; }
    double difference() const { return quote() - realised; }
};

/// Builds one record per delivery period that starts after the first quote.
/// Periods without a usable quote or without any spot day are skipped and
/// reported.
std::vector<BacktestRecord> backtest(const market::MarketPanel& panel, std::string_view area,
                                     market::Horizon horizon, const QuoteSeries& quotes,
                                     std::vector<market::Diagnostic>* diagnostics = nullptr);

/// Columns: area, horizon, start, end, quote_date, cfd, fw, quote,
/// realised, spot_days, difference, predicted.
void write_csv(const std::vector<BacktestRecord>& records, std::ostream& out);

}  // namespace areacfd::forecast
