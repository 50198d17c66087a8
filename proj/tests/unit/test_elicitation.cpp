#include "areacfd/elicitation.hpp"
#include "areacfd/synthetic.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace areacfd;
using namespace areacfd::elicitation;
using market::Covariate;

namespace {

const std::vector<market::AreaInfo> kAreas = synthetic::nordic_areas();

ElicitationProfile table_profile() { return validate_profile(synthetic::example_profile("NO2"), kAreas); }

ElicitationProfile single_row(std::vector<std::string> observed, std::vector<double> rho, double months) {
    // Hydro target: one row per covariate, all sharing rho.
    ElicitationProfile p;
    p.target = "NO3";
    p.observed = std::move(observed);
    for (const Covariate c : {Covariate::FW, Covariate::SA, Covariate::SS, Covariate::WA}) {
        p.rows.push_back({c, rho, months});
    }
    return p;
}

std::vector<double> column(const std::vector<WeightDraw>& draws, std::size_t row, std::size_t k) {
    std::vector<double> v;
    v.reserve(draws.size());
    for (const auto& d : draws) {
        v.push_back(d.rows[row][k]);
    }
    return v;
}

Transcript table_transcript() {
    Transcript t;
    t.target = "NO2";
    t.observed = {"DK1", "DK2", "FI", "NO1", "SE"};
    const std::vector<std::pair<Covariate, std::vector<double>>> answers{
        {Covariate::FW, {5, 5, 5, 75, 10}},
        {Covariate::SA, {5, 5, 5, 80, 5}},
        {Covariate::SS, {5, 5, 5, 80, 5}},
        {Covariate::WA, {0, 0, 5, 85, 10}}};
    for (const auto& [c, row] : answers) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (c == Covariate::WA && k < 2) {
                continue;  // omitted: no hydro in DK1/DK2
            }
            t.similarity.push_back({c, t.observed[k], row[k]});
        }
        t.months.push_back({c, 1.0});
    }
    return t;
}

}  // namespace

TEST_CASE("validation rescales rows onto the simplex") {
    const auto p = table_profile();
    const std::vector<double> fw{0.05, 0.05, 0.05, 0.75, 0.10};
    REQUIRE(p.rows.size() == 4);
    CHECK(p.rows[0].covariate == Covariate::FW);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(p.rows[0].rho[k] == doctest::Approx(fw[k]).epsilon(1e-15));
    }
    CHECK(p.row(Covariate::WA)->rho[0] == 0.0);
    CHECK(p.row(Covariate::WA)->rho[1] == 0.0);

    ElicitationProfile two;
    two.target = "NO3";
    two.observed = {"FI", "NO1"};
    for (const Covariate c : {Covariate::FW, Covariate::SA, Covariate::SS, Covariate::WA}) {
        two.rows.push_back({c, {1, 1}, 2.0});
    }
    for (const auto& r : validate_profile(two, kAreas).rows) {
        CHECK(r.rho == std::vector<double>{0.5, 0.5});
    }
}

TEST_CASE("validation is idempotent and puts rows in covariate order") {
    auto raw = synthetic::example_profile("NO2");
    std::reverse(raw.rows.begin(), raw.rows.end());
    raw.rows[0].rho = {0, 0, 3, 97.5, 1.25};
    const auto once = validate_profile(raw, kAreas);
    const auto twice = validate_profile(once, kAreas);
    CHECK(once == twice);
    CHECK(once.rows[0].covariate == Covariate::FW);
    CHECK(once.rows[3].covariate == Covariate::WA);
}

TEST_CASE("structural and completeness rules") {
    auto base = synthetic::example_profile("NO2");
    SUBCASE("reservoir weight on a dry area") {
        base.rows[3].rho = {0.2, 0, 5, 85, 10};
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.structural_zero");
    }
    SUBCASE("missing row") {
        base.rows.erase(base.rows.begin() + 2);
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.incomplete");
    }
    SUBCASE("extra row for a dry target") {
        base.target = "DK2";
        base.observed = {"DK1", "FI", "NO1", "SE"};
        for (auto& r : base.rows) {
            r.rho = {0, 1, 1, 1};
        }
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.bad_row");
    }
    SUBCASE("negative weight") {
        base.rows[1].rho[2] = -1;
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.negative_entry");
    }
    SUBCASE("all zero") {
        base.rows[1].rho = {0, 0, 0, 0, 0};
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.zero_row");
    }
    SUBCASE("months") {
        base.rows[1].months = 0;
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.nonpositive_months");
    }
    SUBCASE("unobserved source") {
        base.observed[4] = "NO4";
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.not_observed");
    }
    SUBCASE("unknown target") {
        base.target = "XX";
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.unknown_area");
    }
    SUBCASE("width mismatch") {
        base.rows[0].rho.pop_back();
        CHECK(testing::error_code([&] { validate_profile(base, kAreas); }) == "elicitation.bad_row");
    }
}

TEST_CASE("concentration is rho times months times days per month") {
    const auto p = table_profile();
    const auto alpha = concentration(p.rows[0].rho, 1.0);
    const std::vector<double> want{1.05, 1.05, 1.05, 15.75, 2.10};
    double total = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(alpha[k] == doctest::Approx(want[k]).epsilon(1e-12));
        total += alpha[k];
    }
    CHECK(total == doctest::Approx(21.0).epsilon(1e-12));

    const auto doubled = concentration(p.rows[0].rho, 2.0);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(doubled[k] == doctest::Approx(2.0 * alpha[k]).epsilon(1e-15));
    }
    CHECK(concentration(std::vector<double>{1.0}, 3.0)[0] == 63.0);
    CHECK(concentration(std::vector<double>{1.0}, 1.0, 30.0)[0] == 30.0);
}

TEST_CASE("a one-point simplex always draws one") {
    ElicitationProfile p;
    p.target = "NO3";
    p.observed = {"NO1"};
    for (const Covariate c : {Covariate::FW, Covariate::SA, Covariate::SS, Covariate::WA}) {
        p.rows.push_back({c, {1.0}, 0.5});
    }
    for (const auto& d : sample_weights(validate_profile(p, kAreas), 1000, 3)) {
        for (const auto& row : d.rows) {
            CHECK(row == std::vector<double>{1.0});
        }
    }
}

TEST_CASE("draws lie on the simplex with exact structural zeros") {
    const auto p = validate_profile(single_row({"DK1", "DK2", "FI", "NO1"}, {0, 0, 0.5, 0.5}, 1.0), kAreas);
    const auto draws = sample_weights(p, 100000, 17);
    for (const auto& d : draws) {
        for (const auto& row : d.rows) {
            double sum = 0.0;
            for (const double w : row) {
                CHECK(w >= 0.0);
                sum += w;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            CHECK(row[0] == 0.0);
            CHECK(row[1] == 0.0);
        }
    }
    CHECK(std::abs(testing::mean(column(draws, 0, 2)) - 0.5) < 0.01);
    CHECK(std::abs(testing::mean(column(draws, 0, 3)) - 0.5) < 0.01);
}

TEST_CASE("Dirichlet moments match the elicited row") {
    const auto p = table_profile();
    const auto draws = sample_weights(p, 200000, 31);
    const auto& rho = p.rows[0].rho;
    const double a0 = 21.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        const auto w = column(draws, 0, k);
        CAPTURE(k);
        CHECK(std::abs(testing::mean(w) - rho[k]) < 0.01);
        const double var = rho[k] * (1.0 - rho[k]) / (a0 + 1.0);
        CHECK(std::abs(testing::variance(w) / var - 1.0) < 0.05);
    }
}

TEST_CASE("large concentration pins the weights") {
    const auto p = validate_profile(single_row({"FI", "NO1", "SE"}, {0.2, 0.5, 0.3}, 1000.0), kAreas);
    for (const auto& d : sample_weights(p, 20000, 4)) {
        CHECK(std::abs(d.rows[0][0] - 0.2) < 0.02);
        CHECK(std::abs(d.rows[0][1] - 0.5) < 0.02);
        CHECK(std::abs(d.rows[0][2] - 0.3) < 0.02);
    }
}

TEST_CASE("permuting observed areas permutes the draws' distribution") {
    const auto a = validate_profile(single_row({"FI", "NO1", "SE"}, {0.1, 0.6, 0.3}, 0.5), kAreas);
    const auto b = validate_profile(single_row({"SE", "FI", "NO1"}, {0.3, 0.1, 0.6}, 0.5), kAreas);
    const auto da = sample_weights(a, 50000, 8);
    const auto db = sample_weights(b, 50000, 9);
    const std::size_t perm[3] = {1, 2, 0};  // position of a's area k in b
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(testing::mean(column(da, 1, k)) - testing::mean(column(db, 1, perm[k]))) < 0.01);
    }
}

TEST_CASE("weight sampling is seed reproducible") {
    const auto p = table_profile();
    const auto a = sample_weights(p, 100, 5);
    const auto b = sample_weights(p, 100, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rows == b[i].rows);
    }
}

TEST_CASE("session answers become the normalized profile") {
    const auto p = elicit_session(table_transcript(), kAreas);
    CHECK(p == table_profile());
    REQUIRE(p.transcript.has_value());
    CHECK(p.transcript->similarity.size() == 18);

    auto uniform = table_transcript();
    for (auto& s : uniform.similarity) {
        s.answer = 7.0;
    }
    const auto u = elicit_session(uniform, kAreas);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(u.rows[0].rho[k] == doctest::Approx(0.2).epsilon(1e-15));
    }
    CHECK(u.rows[3].rho == std::vector<double>{0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});

    auto missing = table_transcript();
    std::erase_if(missing.similarity, [](const auto& s) { return s.covariate == Covariate::SS; });
    std::erase_if(missing.months, [](const auto& m) { return m.covariate == Covariate::SS; });
    CHECK(testing::error_code([&] { elicit_session(missing, kAreas); }) == "elicitation.incomplete");
}

TEST_CASE("interactive session asks the questions and re-asks on bad input") {
    std::string answers;
    const std::vector<std::vector<std::string>> rows{
        {"5", "5", "5", "75", "10"}, {"5", "5", "5", "80", "5"}, {"5", "5", "5", "80", "5"}, {"5", "85", "10"}};
    for (const auto& row : rows) {
        for (const auto& a : row) {
            answers += a + "\n";
        }
        answers += "1\n";
    }
    // One invalid answer up front; the question is asked again.
    std::istringstream in("seventy\n-1\n" + answers);
    std::ostringstream out;
    const auto t = run_interactive(in, out, "NO2", kAreas);
    CHECK(elicit_session(t, kAreas) == table_profile());
    const auto text = out.str();
    CHECK(text.find(similarity_question(Covariate::FW, "NO2", "DK1")) != std::string::npos);
    CHECK(text.find(months_question()) != std::string::npos);
    CHECK(text.find("DK1 has no hydro") != std::string::npos);

    std::istringstream short_in("5\n5\n");
    std::ostringstream sink;
    CHECK(testing::error_code([&] { run_interactive(short_in, sink, "NO2", kAreas); }) == "elicitation.incomplete");
}

TEST_CASE("profile documents round-trip and hash without the transcript") {
    const auto p = elicit_session(table_transcript(), kAreas);
    const auto back = profile_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(back == p);
    REQUIRE(back.transcript.has_value());
    CHECK(back.transcript->similarity.size() == p.transcript->similarity.size());

    auto bare = p;
    bare.transcript.reset();
    CHECK(profile_hash(bare) == profile_hash(p));
    CHECK(profile_hash(p).size() == 16);
    auto changed = bare;
    changed.rows[0].months = 2.0;
    CHECK(profile_hash(changed) != profile_hash(bare));

    CHECK(testing::error_code([] { profile_from_json(nlohmann::json::parse(R"({"target": 3})")); }) ==
          "elicitation.bad_document");
}
