#pragma once

#include "areacfd/market_data.hpp"
#include "areacfd/random.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace areacfd::elicitation {

inline constexpr double kDefaultDaysPerMonth = 21.0;

/// Expert answers as given, before normalization.
struct Transcript {
    struct Similarity {
        market::Covariate covariate;
        std::string area;
        double answer;
    };
    struct Months {
        market::Covariate covariate;
        double months;
    };

    std::string target;
    std::vector<std::string> observed;
    std::vector<Similarity> similarity;
    std::vector<Months> months;
};

/// Similarity of one covariate's effect in the target area to its effect in
/// each observed area, plus the expert's confidence in months of data.
struct ProfileRow {
    market::Covariate covariate;
    std::vector<double> rho;  // aligned with ElicitationProfile::observed
    double months = 1.0;

    bool operator==(const ProfileRow&) const = default;
};

struct ElicitationProfile {
    std::string target;
    std::vector<std::string> observed;
    std::vector<ProfileRow> rows;
    std::optional<Transcript> transcript;  // audit trail, not part of the judgement

    const ProfileRow* row(market::Covariate c) const;

    /// Compares target, observed order and rows; the transcript is ignored.
    bool operator==(const ElicitationProfile& other) const;
};

/// Rescales each row onto the simplex and enforces the structural rules:
/// known areas, observed areas with CfDs, one row per target covariate,
/// no reservoir weight on areas without hydro, positive months.
ElicitationProfile validate_profile(ElicitationProfile profile, std::span<const market::AreaInfo> areas);

/// Dirichlet concentration alpha_i = rho_i * months * days_per_month.
/// Zero entries stay zero and are treated as structural zeros by the sampler.
std::vector<double> concentration(std::span<const double> rho, double months,
                                  double days_per_month = kDefaultDaysPerMonth);

/// One weight vector per profile row, each on the simplex.
struct WeightDraw {
    std::vector<std::vector<double>> rows;
};

/// Samples weight vectors for a validated profile by normalizing Gamma
/// variates over the positive entries of each row.
class WeightSampler {
public:
    explicit WeightSampler(const ElicitationProfile& profile, double days_per_month = kDefaultDaysPerMonth);

    WeightDraw draw(RandomEngine& rng) const;
    void draw(RandomEngine& rng, WeightDraw& out) const;

private:
    struct Row {
        std::vector<std::size_t> support;
        std::vector<double> alpha;
    };
    std::size_t width_;
    std::vector<Row> rows_;
};

std::vector<WeightDraw> sample_weights(const ElicitationProfile& profile, std::size_t n_draws, std::uint64_t seed,
                                       double days_per_month = kDefaultDaysPerMonth);

/// Builds a profile from a complete transcript. Reservoir answers for areas
/// without hydro may be omitted; they are fixed at zero.
ElicitationProfile elicit_session(const Transcript& transcript, std::span<const market::AreaInfo> areas);

std::string similarity_question(market::Covariate c, std::string_view target, std::string_view observed_area);
std::string months_question();

/// Asks the similarity and months questions on `out`, reading answers from
/// `in`, and returns the transcript. Invalid answers are asked again.
Transcript run_interactive(std::istream& in, std::ostream& out, std::string_view target,
                           std::span<const market::AreaInfo> areas);

nlohmann::json to_json(const ElicitationProfile& profile);
ElicitationProfile profile_from_json(const nlohmann::json& doc);

/// FNV-1a of the canonical document without transcript, as 16 hex digits.
std::string profile_hash(const ElicitationProfile& profile);

}  // namespace areacfd::elicitation
