#include "areacfd/service/json_io.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <fstream>

namespace areacfd::service {

using nlohmann::json;

json to_json(const posterior::PosteriorSummary& s) {
    json names = json::array();
    for (const auto c : s.covariates) {
        names.push_back(std::string(market::to_string(c)));
    }
    std::vector<double> beta(s.beta_hat.data(), s.beta_hat.data() + s.beta_hat.size());
    std::vector<double> upper;
    for (Eigen::Index i = 0; i < s.xtx_inv.rows(); ++i) {
        for (Eigen::Index j = i; j < s.xtx_inv.cols(); ++j) {
            upper.push_back(s.xtx_inv(i, j));
        }
    }
    return {{"area", s.area},
            {"horizon", std::string(market::to_string(s.horizon))},
            {"epoch", s.epoch},
            {"covariates", names},
            {"beta_hat", beta},
            {"xtx_inv_upper", upper},
            {"s2", s.s2},
            {"dof", s.dof}};
}

posterior::PosteriorSummary posterior_from_json(const json& doc) {
    try {
        posterior::PosteriorSummary s;
        s.area = doc.at("area").get<std::string>();
        s.horizon = market::parse_horizon(doc.at("horizon").get<std::string>());
        s.epoch = doc.at("epoch").get<std::string>();
        for (const auto& n : doc.at("covariates")) {
            s.covariates.push_back(market::parse_covariate(n.get<std::string>()));
        }
        const auto beta = doc.at("beta_hat").get<std::vector<double>>();
        const auto upper = doc.at("xtx_inv_upper").get<std::vector<double>>();
        const auto p = static_cast<Eigen::Index>(beta.size());
        if (s.covariates.size() != beta.size() || upper.size() != beta.size() * (beta.size() + 1) / 2) {
            throw Error("posterior.bad_record", "inconsistent coefficient and covariance sizes");
        }
        s.beta_hat = Eigen::Map<const Eigen::VectorXd>(beta.data(), p);
        s.xtx_inv.resize(p, p);
        std::size_t k = 0;
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = i; j < p; ++j) {
                s.xtx_inv(i, j) = s.xtx_inv(j, i) = upper[k++];
            }
        }
        s.s2 = doc.at("s2").get<double>();
        s.dof = doc.at("dof").get<int>();
        if (s.dof < 1 || !(s.s2 >= 0.0)) {
            throw Error("posterior.bad_record", "need dof >= 1 and s2 >= 0");
        }
        return s;
    } catch (const json::exception& e) {
        throw Error("posterior.bad_record", e.what());
    } catch (const Error& e) {
        throw Error("posterior.bad_record", e.what());
    }
}

void save_posteriors(const std::vector<posterior::PosteriorSummary>& summaries, const std::filesystem::path& file) {
    json doc = json::array();
    for (const auto& s : summaries) {
        doc.push_back(to_json(s));
    }
    std::ofstream out(file, std::ios::trunc);
    if (!out) {
        throw Error("posterior.write_failed", fmt::format("cannot write {}", file.string()));
    }
    out << doc.dump(2) << '\n';
}

std::vector<posterior::PosteriorSummary> load_posteriors(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error("posterior.bad_record", fmt::format("cannot read {}", file.string()));
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("posterior.bad_record", fmt::format("{}: {}", file.string(), e.what()));
    }
    std::vector<posterior::PosteriorSummary> out;
    for (const auto& rec : doc) {
        out.push_back(posterior_from_json(rec));
    }
    return out;
}

json to_json(const forecast::ForecastResult& r, std::size_t max_draws) {
    json days = json::array();
    const std::size_t per_day =
        max_draws == 0 || r.days.empty() ? 0 : std::min<std::size_t>(r.n_draws, max_draws / r.days.size());
    bool truncated = false;
    for (const auto& d : r.days) {
        json day = {{"date", format_date(d.date)}, {"epoch", d.epoch}, {"mean", d.mean}, {"quantiles", d.quantiles}};
        if (max_draws > 0) {
            const std::size_t n = std::min(per_day, d.draws.size());
            truncated = truncated || n < r.n_draws;
            day["draws"] = std::vector<double>(d.draws.begin(), d.draws.begin() + static_cast<std::ptrdiff_t>(n));
        }
        days.push_back(std::move(day));
    }
    json doc = {{"target", r.target},
                {"horizon", std::string(market::to_string(r.horizon))},
                {"levels", r.levels},
                {"n_draws", r.n_draws},
                {"provenance",
                 {{"profile_hash", r.provenance.profile_hash},
                  {"epochs", r.provenance.epochs},
                  {"seed", r.provenance.seed},
                  {"n_draws", r.provenance.n_draws},
                  {"days_per_month", r.provenance.days_per_month},
                  {"noise", r.provenance.noise}}},
                {"days", std::move(days)}};
    if (max_draws > 0) {
        doc["draws_truncated"] = truncated;
    }
    return doc;
}

json to_json(const forecast::BacktestRecord& r) {
    return {{"area", r.area},
            {"horizon", std::string(market::to_string(r.horizon))},
            {"start", format_date(r.period.first)},
            {"end", format_date(r.period.last)},
            {"quote_date", format_date(r.quote_date)},
            {"cfd", r.cfd},
            {"fw", r.fw},
            {"quote", r.quote()},
            {"realised", r.realised},
            {"spot_days", r.spot_days},
            {"difference", r.difference()},
            {"predicted", r.predicted}};
}

json areas_json(const market::MarketPanel& panel) {
    json out = json::array();
    for (const auto& a : panel.areas()) {
        out.push_back({{"code", a.code}, {"has_hydro", a.has_hydro}, {"observed_cfd", a.observed_cfd}});
    }
    return out;
}

json panel_summary(const market::MarketPanel& panel, std::size_t diagnostics) {
    const auto& dates = panel.dates();
    auto count = [](const market::Series& s) {
        return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](double v) { return !market::is_missing(v); }));
    };

    json epochs = json::array();
    for (const auto& e : panel.epochs()) {
        epochs.push_back({{"id", e.id()}, {"first", format_date(e.range.first)}, {"last", format_date(e.range.last)}});
    }
    json redefinitions = json::array();
    for (const Date d : panel.redefinitions()) {
        redefinitions.push_back(format_date(d));
    }
    json horizons = json::array();
    json forward = json::object();
    for (const auto h : panel.horizons()) {
        horizons.push_back(std::string(market::to_string(h)));
        forward[std::string(market::to_string(h))] = count(panel.forward(h));
    }
    json coverage = json::object();
    for (const auto& a : panel.areas()) {
        json c = {{"spot", count(panel.area_spot(a.code))}};
        if (const auto* wa = panel.reservoir_deviation(a.code)) {
            c["wa"] = count(*wa);
        }
        json cfd = json::object();
        for (const auto h : market::kAllHorizons) {
            if (const auto* s = panel.cfd(a.code, h)) {
                cfd[std::string(market::to_string(h))] = count(*s);
            }
        }
        c["cfd"] = std::move(cfd);
        coverage[a.code] = std::move(c);
    }
    return {{"first", format_date(dates.front())},
            {"last", format_date(dates.back())},
            {"n_dates", dates.size()},
            {"epochs", std::move(epochs)},
            {"redefinitions", std::move(redefinitions)},
            {"horizons", std::move(horizons)},
            {"coverage", {{"system_spot", count(panel.system_spot())}, {"forward", std::move(forward)}, {"areas", std::move(coverage)}}},
            {"diagnostics", diagnostics}};
}

}  // namespace areacfd::service
