#include "areacfd/backtest.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <map>
#include <ostream>

namespace areacfd::forecast {

using namespace std::chrono;
using market::Horizon;

namespace {

// First day of the period `ahead` periods after the one containing `ymd`,
// where periods are aligned blocks of `months_per_period` calendar months.
Date period_start(const year_month_day& ymd, int months_per_period, int ahead) {
    const int month_index = static_cast<int>(ymd.year()) * 12 + static_cast<int>(unsigned(ymd.month())) - 1;
    const int period_index = month_index / months_per_period + ahead;
    const int first_month = period_index * months_per_period;
    return sys_days{year{first_month / 12} / month{static_cast<unsigned>(first_month % 12 + 1)} / day{1}};
}

Date add_months(Date d, int n) {
    return sys_days{year_month_day{d} + months{n}};
}

}  // namespace

DateRange delivery_period(Date quote_date, Horizon horizon) {
    const year_month_day ymd{quote_date};
    int span = 1;
    int ahead = 1;
    switch (horizon) {
        case Horizon::M1: span = 1; ahead = 1; break;
        case Horizon::M2: span = 1; ahead = 2; break;
        case Horizon::Q1: span = 3; ahead = 1; break;
        case Horizon::Q2: span = 3; ahead = 2; break;
        case Horizon::Q3: span = 3; ahead = 3; break;
        case Horizon::Y1: span = 12; ahead = 1; break;
        case Horizon::Y2: span = 12; ahead = 2; break;
        case Horizon::Y3: span = 12; ahead = 3; break;
    }
    const Date first = period_start(ymd, span, ahead);
    return {first, add_months(first, span) - days{1}};
}

QuoteSeries observed_quotes(const market::MarketPanel& panel, std::string_view area, Horizon horizon) {
    const auto* cfd = panel.cfd(area, horizon);
    if (cfd == nullptr) {
        throw Error("backtest.no_quotes", fmt::format("{} has no {} CfD quotes", area, market::to_string(horizon)));
    }
    QuoteSeries q;
    for (std::size_t i = 0; i < panel.dates().size(); ++i) {
        if (!market::is_missing((*cfd)[i])) {
            q.dates.push_back(panel.dates()[i]);
            q.cfd.push_back((*cfd)[i]);
        }
    }
    return q;
}

QuoteSeries predicted_quotes(const ForecastResult& result) {
    QuoteSeries q;
    q.predicted = true;
    for (const auto& d : result.days) {
        q.dates.push_back(d.date);
        q.cfd.push_back(d.mean);
    }
    return q;
}

std::vector<BacktestRecord> backtest(const market::MarketPanel& panel, std::string_view area, Horizon horizon,
                                     const QuoteSeries& quotes, std::vector<market::Diagnostic>* diagnostics) {
    if (quotes.dates.size() != quotes.cfd.size()) {
        throw Error("backtest.bad_quotes", "quote dates and values differ in length");
    }
    const auto& spot = panel.area_spot(area);
    const auto& fw = panel.forward(horizon);
    const auto& dates = panel.dates();
    auto note = [&](std::string code, std::string message) {
        if (diagnostics != nullptr) {
            diagnostics->push_back({std::move(code), std::move(message), {}});
        }
    };

    // Last usable quote per delivery period, keyed by period start.
    struct Quote {
        Date date;
        double cfd;
        double fw;
    };
    std::map<Date, Quote> last_quote;
    for (std::size_t k = 0; k < quotes.dates.size(); ++k) {
        const Date d = quotes.dates[k];
        const auto idx = panel.index_of(d);
        if (!idx || market::is_missing(fw[*idx])) {
            continue;
        }
        last_quote[delivery_period(d, horizon).first] = {d, quotes.cfd[k], fw[*idx]};
    }
    if (quotes.dates.empty()) {
        return {};
    }

    std::map<Date, DateRange> periods;
    for (const Date d : dates) {
        if (d >= quotes.dates.front()) {
            const auto p = delivery_period(d, horizon);
            periods.emplace(p.first, p);
        }
    }

    std::vector<BacktestRecord> records;
    for (const auto& [start, period] : periods) {
        const auto q = last_quote.find(start);
        if (q == last_quote.end()) {
            note("backtest.no_quote", fmt::format("{} {} {}..{}: no quote before delivery", area,
                                                  market::to_string(horizon), format_date(period.first),
                                                  format_date(period.last)));
            continue;
        }
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < dates.size(); ++i) {
            if (period.contains(dates[i]) && !market::is_missing(spot[i])) {
                sum += spot[i];
                ++n;
            }
        }
        if (n == 0) {
            note("backtest.no_spot", fmt::format("{} {} {}..{}: no spot data in delivery period", area,
                                                 market::to_string(horizon), format_date(period.first),
                                                 format_date(period.last)));
            continue;
        }
        BacktestRecord r;
        r.area = std::string(area);
        r.horizon = horizon;
        r.period = period;
        r.quote_date = q->second.date;
        r.cfd = q->second.cfd;
        r.fw = q->second.fw;
        r.realised = sum / static_cast<double>(n);
        r.spot_days = n;
        r.predicted = quotes.predicted;
        records.push_back(r);
    }
    return records;
}

void write_csv(const std::vector<BacktestRecord>& records, std::ostream& out) {
    out << "area,horizon,start,end,quote_date,cfd,fw,quote,realised,spot_days,difference,predicted\n";
    for (const auto& r : records) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.area, market::to_string(r.horizon),
                           format_date(r.period.first), format_date(r.period.last), format_date(r.quote_date), r.cfd,
                           r.fw, r.quote(), r.realised, r.spot_days, r.difference(), r.predicted);
    }
}

}  // namespace areacfd::forecast
