#include "areacfd/forecast.hpp"
#include "areacfd/posterior.hpp"

#include "support.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <random>
#include <sstream>

using namespace areacfd;
using namespace areacfd::forecast;
using market::Covariate;
using market::Horizon;

namespace {

const std::vector<market::AreaInfo> kAreas{
    {"DK1", false, true}, {"FI", true, true}, {"NO1", true, true}, {"NO2", true, false}};

struct Market {
    market::MarketPanel panel;
    std::vector<posterior::PosteriorSummary> posteriors;
};

// Daily panel from 2009-01-01; `redefinition_after` days in, a new epoch
// starts. Observed CfDs follow fixed coefficients plus noise.
Market make_market(int days, int redefinition_after = 0, double noise_sd = 0.5, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    market::PanelBuilder b(kAreas);
    const Date first = parse_date("2009-01-01");
    if (redefinition_after > 0) {
        b.add_redefinition(first + std::chrono::days{redefinition_after});
    }
    const std::map<std::string, std::vector<double>> beta{
        {"DK1", {-0.2, 0.5, -0.45}}, {"FI", {-0.05, 0.45, -0.45, 1.2}}, {"NO1", {-0.1, 0.52, -0.45, 1.0}}};
    for (int t = 0; t < days; ++t) {
        const Date d = first + std::chrono::days{t};
        const double ss = 40.0 + 5.0 * std::sin(t / 20.0) + n01(rng);
        const double fw = 45.0 + 3.0 * std::cos(t / 15.0) + n01(rng);
        b.add_system_spot(d, ss);
        b.add_forward(Horizon::M1, d, fw);
        for (const auto& a : kAreas) {
            const double sa = ss + 2.0 * n01(rng);
            const double wa = 0.3 * std::sin(t / 30.0 + static_cast<double>(a.code.size())) + 0.05 * n01(rng);
            b.add_area_spot(a.code, d, sa);
            if (a.has_hydro) {
                b.add_reservoir_deviation(a.code, d, wa);
            }
            if (a.observed_cfd) {
                const auto& bk = beta.at(a.code);
                double y = bk[0] * fw + bk[1] * sa + bk[2] * ss + (a.has_hydro ? bk[3] * wa : 0.0);
                b.add_cfd(a.code, Horizon::M1, d, y + noise_sd * n01(rng));
            }
        }
    }
    Market m{std::move(b).build(), {}};
    for (const auto& a : kAreas) {
        if (a.observed_cfd) {
            for (const auto& e : m.panel.epochs()) {
                m.posteriors.push_back(posterior::fit_area(m.panel, a.code, Horizon::M1, e));
            }
        }
    }
    return m;
}

elicitation::ElicitationProfile profile(std::vector<std::vector<double>> rows, double months,
                                        std::vector<std::string> observed = {"DK1", "FI", "NO1"}) {
    elicitation::ElicitationProfile p;
    p.target = "NO2";
    p.observed = std::move(observed);
    const Covariate order[] = {Covariate::FW, Covariate::SA, Covariate::SS, Covariate::WA};
    for (std::size_t j = 0; j < rows.size(); ++j) {
        p.rows.push_back({order[j], rows[j], months});
    }
    return elicitation::validate_profile(p, kAreas);
}

elicitation::ElicitationProfile mixed(double months) {
    return profile({{0.2, 0.3, 0.5}, {0.1, 0.2, 0.7}, {0.3, 0.3, 0.4}, {0.0, 0.4, 0.6}}, months);
}

double mean_width(const ForecastResult& r, std::string_view epoch = {}) {
    double total = 0.0;
    int n = 0;
    for (const auto& d : r.days) {
        if (epoch.empty() || d.epoch == epoch) {
            total += d.quantiles.back() - d.quantiles.front();
            ++n;
        }
    }
    return total / n;
}

bool same_result(const ForecastResult& a, const ForecastResult& b) {
    if (a.days.size() != b.days.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.days.size(); ++i) {
        const auto& x = a.days[i];
        const auto& y = b.days[i];
        if (x.date != y.date || x.epoch != y.epoch || x.mean != y.mean || x.quantiles != y.quantiles ||
            x.draws != y.draws) {
            return false;
        }
    }
    return a.provenance.profile_hash == b.provenance.profile_hash && a.provenance.epochs == b.provenance.epochs;
}

}  // namespace

TEST_CASE("nearest-rank quantiles") {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) {
        v.push_back(i);
    }
    CHECK(nearest_rank(v, 0.025) == 1);
    CHECK(nearest_rank(v, 0.1) == 1);
    CHECK(nearest_rank(v, 0.11) == 2);
    CHECK(nearest_rank(v, 0.5) == 5);
    CHECK(nearest_rank(v, 0.975) == 10);
    std::vector<double> w(200);
    for (int i = 0; i < 200; ++i) {
        w[i] = i + 1;
    }
    CHECK(nearest_rank(w, 0.975) == 195);
    CHECK(nearest_rank(w, 0.025) == 5);
    CHECK(testing::error_code([] { nearest_rank(std::vector<double>{}, 0.5); }) == "forecast.no_draws");
}

TEST_CASE("identical point-mass posteriors give zero-width bands") {
    const auto m = make_market(40);
    Eigen::VectorXd beta(4);
    beta << -0.1, 0.5, -0.4, 0.8;
    std::vector<posterior::PosteriorSummary> posts;
    for (const char* area : {"FI", "NO1"}) {
        posterior::PosteriorSummary s;
        s.beta_hat = beta;
        s.xtx_inv = Eigen::MatrixXd::Identity(4, 4);
        s.s2 = 0.0;
        s.dof = 10;
        s.covariates = market::covariates_for(true);
        s.area = area;
        s.horizon = Horizon::M1;
        s.epoch = "2009-01-01";
        posts.push_back(s);
    }
    const auto p = profile({{0.4, 0.6}, {0.5, 0.5}, {0.9, 0.1}, {0.2, 0.8}}, 0.3, {"FI", "NO1"});
    ForecastOptions o;
    o.n_draws = 500;
    o.seed = 3;
    const auto r = run_forecast(m.panel, posts, p, Horizon::M1, o);
    const auto x = market::design_matrix(m.panel, "NO2", Horizon::M1,
                                         {m.panel.dates().front(), m.panel.dates().back()});
    REQUIRE(r.days.size() == static_cast<std::size_t>(x.x.rows()));
    for (std::size_t t = 0; t < r.days.size(); ++t) {
        const double mu = x.x.row(static_cast<Eigen::Index>(t)).dot(beta);
        CHECK(std::abs(r.days[t].mean - mu) < 1e-9 * std::max(1.0, std::abs(mu)));
        CHECK(std::abs(r.days[t].quantiles.front() - mu) < 1e-9 * std::max(1.0, std::abs(mu)));
        CHECK(std::abs(r.days[t].quantiles.back() - mu) < 1e-9 * std::max(1.0, std::abs(mu)));
    }
}

TEST_CASE("two point masses mixed half and half") {
    // Target covariates: FW = 10, everything else 0; area A has beta_FW = 1,
    // area B has beta_FW = 3. The Dirichlet mean gives 0.5 * 10 + 0.5 * 30.
    market::PanelBuilder b(kAreas);
    for (int t = 0; t < 5; ++t) {
        const Date d = parse_date("2009-01-05") + std::chrono::days{t};
        b.add_system_spot(d, 0.0);
        b.add_forward(Horizon::M1, d, 10.0);
        b.add_area_spot("NO2", d, 0.0);
        b.add_reservoir_deviation("NO2", d, 0.0);
    }
    const auto panel = std::move(b).build();
    std::vector<posterior::PosteriorSummary> posts;
    for (const auto& [area, value] : std::vector<std::pair<std::string, double>>{{"FI", 1.0}, {"NO1", 3.0}}) {
        posterior::PosteriorSummary s;
        s.beta_hat = Eigen::VectorXd::Zero(4);
        s.beta_hat(0) = value;
        s.xtx_inv = Eigen::MatrixXd::Identity(4, 4);
        s.dof = 5;
        s.covariates = market::covariates_for(true);
        s.area = area;
        s.epoch = "2009-01-05";
        posts.push_back(s);
    }
    const auto p = profile({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, 1000.0, {"FI", "NO1"});
    ForecastOptions o;
    o.n_draws = 50000;
    o.seed = 12;
    const auto r = run_forecast(panel, posts, p, Horizon::M1, o);
    for (const auto& d : r.days) {
        CHECK(std::abs(d.mean - 20.0) < 0.5);
        // Every draw is a convex combination: 10 <= mu <= 30.
        CHECK(d.quantiles.front() >= 10.0);
        CHECK(d.quantiles.back() <= 30.0);
    }
}

TEST_CASE("all weight on one area reduces to that area's posterior") {
    const auto m = make_market(120);
    const auto p = profile({{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}}, 1e6);
    ForecastOptions o;
    o.n_draws = 100000;
    o.seed = 5;
    o.keep_draws = true;
    const Date day = parse_date("2009-02-10");
    o.window = DateRange{day, day};
    const auto r = run_forecast(m.panel, m.posteriors, p, Horizon::M1, o);
    REQUIRE(r.days.size() == 1);

    // Oracle: sample NO1's posterior directly and apply the target's covariates.
    const auto x = market::design_matrix(m.panel, "NO2", Horizon::M1, {day, day});
    const posterior::PosteriorSummary* no1 = nullptr;
    for (const auto& s : m.posteriors) {
        if (s.area == "NO1") {
            no1 = &s;
        }
    }
    REQUIRE(no1 != nullptr);
    std::vector<double> direct;
    for (const auto& d : posterior::sample(*no1, 100000, 999)) {
        direct.push_back(x.x.row(0).dot(d.beta));
    }
    CHECK(testing::ks_two_sample(r.days[0].draws, direct) < 0.02);
}

TEST_CASE("forecast means are convex combinations per coefficient") {
    const auto m = make_market(60);
    // Point-mass posteriors with distinct coefficients per area.
    std::vector<posterior::PosteriorSummary> posts;
    const std::map<std::string, std::vector<double>> betas{
        {"DK1", {-0.3, 0.6, -0.5}}, {"FI", {0.1, 0.4, -0.3, 1.5}}, {"NO1", {-0.1, 0.5, -0.6, -0.5}}};
    for (const auto& [area, b] : betas) {
        posterior::PosteriorSummary s;
        s.beta_hat = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
        s.xtx_inv = Eigen::MatrixXd::Identity(s.beta_hat.size(), s.beta_hat.size());
        s.dof = 5;
        s.covariates = market::covariates_for(b.size() == 4);
        s.area = area;
        s.epoch = "2009-01-01";
        posts.push_back(s);
    }
    const auto p = mixed(0.5);
    ForecastOptions o;
    o.n_draws = 40000;
    o.seed = 21;
    o.keep_draws = true;
    const auto r = run_forecast(m.panel, posts, p, Horizon::M1, o);
    const auto x = market::design_matrix(m.panel, "NO2", Horizon::M1,
                                         {m.panel.dates().front(), m.panel.dates().back()});
    const char* order[] = {"DK1", "FI", "NO1"};
    for (std::size_t t = 0; t < r.days.size(); ++t) {
        double lo = 0.0;
        double hi = 0.0;
        double expected = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double xj = x.x(static_cast<Eigen::Index>(t), j);
            double cmin = 1e300;
            double cmax = -1e300;
            for (std::size_t k = 0; k < 3; ++k) {
                const double rho = p.rows[j].rho[k];
                if (rho > 0.0) {
                    const double c = betas.at(order[k])[j] * xj;
                    cmin = std::min(cmin, c);
                    cmax = std::max(cmax, c);
                    expected += rho * c;
                }
            }
            lo += cmin;
            hi += cmax;
        }
        for (const double v : r.days[t].draws) {
            CHECK(v >= lo - 1e-9 * std::abs(lo));
            CHECK(v <= hi + 1e-9 * std::abs(hi));
        }
        // Expectation under the Dirichlet is the rho-weighted combination.
        const double se = std::sqrt(testing::variance(r.days[t].draws) / static_cast<double>(o.n_draws));
        CHECK(std::abs(r.days[t].mean - expected) < 5.0 * se);
    }
}

TEST_CASE("results are bit-identical across runs and thread counts") {
    const auto m = make_market(90, 45);
    const auto p = mixed(2.0);
    ForecastOptions o;
    o.n_draws = 3000;
    o.seed = 77;
    o.keep_draws = true;
    const auto base = run_forecast(m.panel, m.posteriors, p, Horizon::M1, o);
    CHECK(same_result(base, run_forecast(m.panel, m.posteriors, p, Horizon::M1, o)));
    for (const unsigned threads : {2u, 3u, 8u, 0u}) {
        o.threads = threads;
        CHECK(same_result(base, run_forecast(m.panel, m.posteriors, p, Horizon::M1, o)));
    }
    o.noise = true;
    o.threads = 1;
    const auto noisy = run_forecast(m.panel, m.posteriors, p, Horizon::M1, o);
    o.threads = 4;
    CHECK(same_result(noisy, run_forecast(m.panel, m.posteriors, p, Horizon::M1, o)));
    o.seed = 78;
    CHECK_FALSE(same_result(noisy, run_forecast(m.panel, m.posteriors, p, Horizon::M1, o)));
}

TEST_CASE("reported quantiles match a recomputation from the raw draws") {
    const auto m = make_market(30);
    ForecastOptions o;
    o.n_draws = 999;
    o.seed = 4;
    o.keep_draws = true;
    o.levels = {0.01, 0.1, 0.5, 0.9, 0.99};
    const auto r = run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o);
    for (const auto& d : r.days) {
        auto sorted = d.draws;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (const double v : d.draws) {
            sum += v;
        }
        CHECK(d.mean == doctest::Approx(sum / 999.0).epsilon(1e-12));
        for (std::size_t i = 0; i < o.levels.size(); ++i) {
            // ceil(level * n) as an integer, independent of floating rounding.
            const int permille = static_cast<int>(std::lround(o.levels[i] * 1000));
            const std::size_t rank = (static_cast<std::size_t>(permille) * 999 + 999) / 1000;
            CHECK(d.quantiles[i] == sorted[rank - 1]);
        }
    }
}

TEST_CASE("more months never widen the band") {
    const auto m = make_market(40);
    ForecastOptions o;
    o.n_draws = 100000;
    o.seed = 9;
    o.window = DateRange{parse_date("2009-01-10"), parse_date("2009-01-16")};
    double previous = std::numeric_limits<double>::infinity();
    for (const double months : {0.25, 1.0, 12.0, 200.0}) {
        const double w = mean_width(run_forecast(m.panel, m.posteriors, mixed(months), Horizon::M1, o));
        CAPTURE(months);
        CHECK(w <= previous * 1.005);
        previous = w;
    }
}

TEST_CASE("a short epoch gives wider bands than a long one") {
    // 330 days before the redefinition, 33 after: ten times fewer rows.
    const auto m = make_market(363, 330, 2.0, 8);
    REQUIRE(m.panel.epochs().size() == 2);
    ForecastOptions o;
    o.n_draws = 20000;
    o.seed = 10;
    const auto p = profile({{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}}, 1000.0);
    const auto r = run_forecast(m.panel, m.posteriors, p, Horizon::M1, o);
    CHECK(r.provenance.epochs == std::vector<std::string>{"2009-01-01", "2009-11-27"});
    CHECK(mean_width(r, "2009-11-27") > mean_width(r, "2009-01-01"));
}

TEST_CASE("noise mode widens the band around the same centre") {
    const auto m = make_market(40);
    ForecastOptions o;
    o.n_draws = 20000;
    o.seed = 2;
    const auto plain = run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o);
    o.noise = true;
    const auto noisy = run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o);
    CHECK(noisy.provenance.noise);
    CHECK(mean_width(noisy) > mean_width(plain));
    for (std::size_t i = 0; i < plain.days.size(); ++i) {
        CHECK(std::abs(noisy.days[i].mean - plain.days[i].mean) < 0.1);
    }
}

TEST_CASE("forecast preconditions") {
    const auto m = make_market(30);
    ForecastOptions o;
    o.n_draws = 10;
    SUBCASE("missing posterior for a weighted area") {
        std::vector<posterior::PosteriorSummary> without_fi;
        for (const auto& s : m.posteriors) {
            if (s.area != "FI") {
                without_fi.push_back(s);
            }
        }
        CHECK(testing::error_code([&] { run_forecast(m.panel, without_fi, mixed(1.0), Horizon::M1, o); }) ==
              "forecast.missing_posterior");
        // No weight on FI: its posterior is not needed.
        const auto p = profile({{0.5, 0, 0.5}, {0.5, 0, 0.5}, {0.5, 0, 0.5}, {0, 0, 1}}, 1.0);
        CHECK_NOTHROW(run_forecast(m.panel, without_fi, p, Horizon::M1, o));
    }
    SUBCASE("bad options") {
        o.n_draws = 0;
        CHECK(testing::error_code([&] { run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o); }) ==
              "forecast.bad_options");
        o.n_draws = 10;
        o.levels = {0.5, 0.4};
        CHECK(testing::error_code([&] { run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o); }) ==
              "forecast.bad_options");
    }
    SUBCASE("target covariates unavailable") {
        CHECK(testing::error_code([&] { run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::Q1, o); }) ==
              "market.no_forward");
        o.window = DateRange{parse_date("2012-01-01"), parse_date("2012-02-01")};
        CHECK(testing::error_code([&] { run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o); }) ==
              "forecast.missing_covariate");
    }
}

TEST_CASE("csv export") {
    const auto m = make_market(10);
    ForecastOptions o;
    o.n_draws = 20;
    const auto r = run_forecast(m.panel, m.posteriors, mixed(1.0), Horizon::M1, o);
    std::ostringstream out;
    write_csv(r, out);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "date,mean,q2.5,q50,q97.5,n_draws");
    std::string first;
    std::getline(lines, first);
    CHECK(first.rfind("2009-01-01,", 0) == 0);
    CHECK(first.substr(first.size() - 3) == ",20");
}
