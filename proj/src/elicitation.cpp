#include "areacfd/elicitation.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace areacfd::elicitation {

using market::AreaInfo;
using market::Covariate;

namespace {

const AreaInfo& find_area(std::span<const AreaInfo> areas, std::string_view code) {
    for (const auto& a : areas) {
        if (a.code == code) {
            return a;
        }
    }
    throw Error("elicitation.unknown_area", fmt::format("unknown area '{}'", code));
}

std::string_view describe(Covariate c) {
    switch (c) {
        case Covariate::FW:
            return "the system forward price";
        case Covariate::SA:
            return "the area spot price";
        case Covariate::SS:
            return "the system spot price";
        case Covariate::WA:
            return "hydrological balance";
    }
    return "";
}

}  // namespace

const ProfileRow* ElicitationProfile::row(Covariate c) const {
    for (const auto& r : rows) {
        if (r.covariate == c) {
            return &r;
        }
    }
    return nullptr;
}

bool ElicitationProfile::operator==(const ElicitationProfile& other) const {
    return target == other.target && observed == other.observed && rows == other.rows;
}

ElicitationProfile validate_profile(ElicitationProfile profile, std::span<const AreaInfo> areas) {
    const AreaInfo& target = find_area(areas, profile.target);
    if (profile.observed.empty()) {
        throw Error("elicitation.bad_row", "profile lists no observed areas");
    }
    std::set<std::string, std::less<>> seen;
    for (const auto& code : profile.observed) {
        if (!find_area(areas, code).observed_cfd) {
            throw Error("elicitation.not_observed", fmt::format("area {} has no observed CfDs to borrow from", code));
        }
        if (!seen.insert(code).second) {
            throw Error("elicitation.bad_row", fmt::format("observed area {} listed twice", code));
        }
    }

    const auto required = market::covariates_for(target.has_hydro);
    std::vector<ProfileRow> ordered;
    for (const Covariate c : required) {
        const auto count = std::count_if(profile.rows.begin(), profile.rows.end(),
                                         [&](const ProfileRow& r) { return r.covariate == c; });
        if (count == 0) {
            throw Error("elicitation.incomplete",
                        fmt::format("no {} row for target {}", market::to_string(c), profile.target));
        }
        if (count > 1) {
            throw Error("elicitation.bad_row", fmt::format("{} row given twice", market::to_string(c)));
        }
        ordered.push_back(*profile.row(c));
    }
    if (ordered.size() != profile.rows.size()) {
        throw Error("elicitation.bad_row", fmt::format("target {} has no use for some rows ({} given, {} needed)",
                                                       profile.target, profile.rows.size(), ordered.size()));
    }

    const std::size_t q = profile.observed.size();
    for (auto& row : ordered) {
        const auto name = market::to_string(row.covariate);
        if (row.rho.size() != q) {
            throw Error("elicitation.bad_row",
                        fmt::format("{} row has {} entries for {} observed areas", name, row.rho.size(), q));
        }
        if (!(row.months > 0.0) || !std::isfinite(row.months)) {
            throw Error("elicitation.nonpositive_months",
                        fmt::format("{} row: months of data must be positive, got {}", name, row.months));
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            const double v = row.rho[i];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw Error("elicitation.negative_entry",
                            fmt::format("{} row: weight {} for {} must be finite and non-negative", name, v,
                                        profile.observed[i]));
            }
            if (row.covariate == Covariate::WA && v > 0.0 && !find_area(areas, profile.observed[i]).has_hydro) {
                throw Error("elicitation.structural_zero",
                            fmt::format("{} has no hydro; its reservoir weight must be 0", profile.observed[i]));
            }
            sum += v;
        }
        if (!(sum > 0.0)) {
            throw Error("elicitation.zero_row", fmt::format("{} row has no positive weight", name));
        }
        // Rows already on the simplex are left bit-for-bit alone so that
        // validation is idempotent.
        if (std::abs(sum - 1.0) > 4.0 * static_cast<double>(q) * std::numeric_limits<double>::epsilon()) {
            for (auto& v : row.rho) {
                v /= sum;
            }
        }
    }
    profile.rows = std::move(ordered);
    return profile;
}

std::vector<double> concentration(std::span<const double> rho, double months, double days_per_month) {
    if (!(months > 0.0) || !(days_per_month > 0.0)) {
        throw Error("elicitation.nonpositive_months", "months and days per month must be positive");
    }
    const double total = months * days_per_month;
    std::vector<double> alpha(rho.size());
    std::transform(rho.begin(), rho.end(), alpha.begin(), [&](double r) { return r > 0.0 ? r * total : 0.0; });
    return alpha;
}

// ---------------------------------------------------------------------------

WeightSampler::WeightSampler(const ElicitationProfile& profile, double days_per_month)
    : width_(profile.observed.size()) {
    for (const auto& r : profile.rows) {
        const auto alpha = concentration(r.rho, r.months, days_per_month);
        Row row;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] > 0.0) {
                row.support.push_back(i);
                row.alpha.push_back(alpha[i]);
            }
        }
        if (row.support.empty()) {
            throw Error("elicitation.zero_row", "profile row has no positive weight");
        }
        rows_.push_back(std::move(row));
    }
}

void WeightSampler::draw(RandomEngine& rng, WeightDraw& out) const {
    out.rows.resize(rows_.size());
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        const auto& row = rows_[j];
        auto& w = out.rows[j];
        w.assign(width_, 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < row.support.size(); ++k) {
            std::gamma_distribution<double> gamma(row.alpha[k], 1.0);
            const double g = gamma(rng);
            w[row.support[k]] = g;
            total += g;
        }
        for (const auto i : row.support) {
            w[i] /= total;
        }
    }
}

WeightDraw WeightSampler::draw(RandomEngine& rng) const {
    WeightDraw out;
    draw(rng, out);
    return out;
}

std::vector<WeightDraw> sample_weights(const ElicitationProfile& profile, std::size_t n_draws, std::uint64_t seed,
                                       double days_per_month) {
    const WeightSampler sampler(profile, days_per_month);
    auto rng = make_stream(seed);
    std::vector<WeightDraw> draws(n_draws);
    for (auto& d : draws) {
        sampler.draw(rng, d);
    }
    return draws;
}

// ---------------------------------------------------------------------------
// Sessions

ElicitationProfile elicit_session(const Transcript& transcript, std::span<const AreaInfo> areas) {
    const AreaInfo& target = find_area(areas, transcript.target);

    ElicitationProfile profile;
    profile.target = transcript.target;
    profile.observed = transcript.observed;
    for (const Covariate c : market::covariates_for(target.has_hydro)) {
        ProfileRow row{c, {}, 0.0};
        for (const auto& area : transcript.observed) {
            const auto it = std::find_if(transcript.similarity.begin(), transcript.similarity.end(),
                                         [&](const auto& s) { return s.covariate == c && s.area == area; });
            if (it != transcript.similarity.end()) {
                row.rho.push_back(it->answer);
            } else if (c == Covariate::WA && !find_area(areas, area).has_hydro) {
                row.rho.push_back(0.0);
            } else {
                throw Error("elicitation.incomplete", fmt::format("no {} answer for {}", market::to_string(c), area));
            }
        }
        const auto m = std::find_if(transcript.months.begin(), transcript.months.end(),
                                    [&](const auto& x) { return x.covariate == c; });
        if (m == transcript.months.end()) {
            throw Error("elicitation.incomplete", fmt::format("no months-of-data answer for {}", market::to_string(c)));
        }
        row.months = m->months;
        profile.rows.push_back(std::move(row));
    }
    profile = validate_profile(std::move(profile), areas);
    profile.transcript = transcript;
    return profile;
}

std::string similarity_question(Covariate c, std::string_view target, std::string_view observed_area) {
    const auto what = describe(c);
    return fmt::format(
        "Consider the effect of {0} (in {1}) on (the hypothetical) CfD price in area {1}. "
        "How similar is this to the effect of {0} (in {2}) on the (observed) CfD price in {2}?",
        what, target, observed_area);
}

std::string months_question() {
    return "Consider your answers to the previous questions. This is a question which also could have been "
           "answered using empirical data, if these were available. How many months of data do you feel would "
           "give an information content equivalent to your subjective assessment?";
}

namespace {

double ask(std::istream& in, std::ostream& out, const std::string& question, bool positive) {
    std::string line;
    while (true) {
        out << question << "\n> " << std::flush;
        if (!std::getline(in, line)) {
            throw Error("elicitation.incomplete", "session ended before all questions were answered");
        }
        std::istringstream parse(line);
        double v = 0.0;
        std::string rest;
        if (parse >> v && !(parse >> rest) && std::isfinite(v) && (positive ? v > 0.0 : v >= 0.0)) {
            return v;
        }
        out << (positive ? "Please enter a positive number.\n" : "Please enter a non-negative number.\n");
    }
}

}  // namespace

Transcript run_interactive(std::istream& in, std::ostream& out, std::string_view target,
                           std::span<const AreaInfo> areas) {
    const AreaInfo& t = find_area(areas, target);
    Transcript transcript;
    transcript.target = std::string(target);
    for (const auto& a : areas) {
        if (a.observed_cfd) {
            transcript.observed.push_back(a.code);
        }
    }
    out << fmt::format("Eliciting similarity weights for {} against {}.\n"
                       "Answer on any non-negative scale; each row is rescaled to sum to one.\n",
                       target, fmt::join(transcript.observed, ", "));
    for (const Covariate c : market::covariates_for(t.has_hydro)) {
        out << fmt::format("\n[{}]\n", market::to_string(c));
        for (const auto& code : transcript.observed) {
            if (c == Covariate::WA && !find_area(areas, code).has_hydro) {
                out << fmt::format("({} has no hydro; weight fixed at 0)\n", code);
                continue;
            }
            transcript.similarity.push_back({c, code, ask(in, out, similarity_question(c, target, code), false)});
        }
        transcript.months.push_back({c, ask(in, out, months_question(), true)});
    }
    return transcript;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json to_json(const ElicitationProfile& profile) {
    nlohmann::json doc;
    doc["target"] = profile.target;
    doc["observed"] = profile.observed;
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : profile.rows) {
        doc["rows"].push_back(
            {{"covariate", std::string(market::to_string(r.covariate))}, {"rho", r.rho}, {"months", r.months}});
    }
    if (profile.transcript) {
        const auto& t = *profile.transcript;
        nlohmann::json tj;
        tj["target"] = t.target;
        tj["observed"] = t.observed;
        tj["similarity"] = nlohmann::json::array();
        for (const auto& s : t.similarity) {
            tj["similarity"].push_back(
                {{"covariate", std::string(market::to_string(s.covariate))}, {"area", s.area}, {"answer", s.answer}});
        }
        tj["months"] = nlohmann::json::array();
        for (const auto& m : t.months) {
            tj["months"].push_back({{"covariate", std::string(market::to_string(m.covariate))}, {"months", m.months}});
        }
        doc["transcript"] = std::move(tj);
    }
    return doc;
}

ElicitationProfile profile_from_json(const nlohmann::json& doc) {
    try {
        ElicitationProfile p;
        p.target = doc.at("target").get<std::string>();
        p.observed = doc.at("observed").get<std::vector<std::string>>();
        for (const auto& r : doc.at("rows")) {
            p.rows.push_back({market::parse_covariate(r.at("covariate").get<std::string>()),
                              r.at("rho").get<std::vector<double>>(), r.at("months").get<double>()});
        }
        if (doc.contains("transcript")) {
            const auto& tj = doc["transcript"];
            Transcript t;
            t.target = tj.at("target").get<std::string>();
            t.observed = tj.at("observed").get<std::vector<std::string>>();
            for (const auto& s : tj.at("similarity")) {
                t.similarity.push_back({market::parse_covariate(s.at("covariate").get<std::string>()),
                                        s.at("area").get<std::string>(), s.at("answer").get<double>()});
            }
            for (const auto& m : tj.at("months")) {
                t.months.push_back(
                    {market::parse_covariate(m.at("covariate").get<std::string>()), m.at("months").get<double>()});
            }
            p.transcript = std::move(t);
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error("elicitation.bad_document", fmt::format("profile document: {}", e.what()));
    } catch (const Error& e) {
        throw Error("elicitation.bad_document", fmt::format("profile document: {}", e.what()));
    }
}

std::string profile_hash(const ElicitationProfile& profile) {
    ElicitationProfile bare = profile;
    bare.transcript.reset();
    const auto text = to_json(bare).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace areacfd::elicitation
