#include "areacfd/service/report.hpp"

#include <fmt/format.h>

#include <map>
#include <ostream>
#include <set>

namespace areacfd::service {

using market::Covariate;

namespace {

constexpr Covariate kRowOrder[] = {Covariate::SA, Covariate::SS, Covariate::FW, Covariate::WA};

struct Block {
    market::Horizon horizon;
    std::string epoch;
    std::vector<std::string> cells;  // row-major, rows kRowOrder, columns observed areas
};

std::vector<std::string> observed_areas(const market::MarketPanel& panel) {
    std::vector<std::string> out;
    for (const auto& a : panel.areas()) {
        if (a.observed_cfd) {
            out.push_back(a.code);
        }
    }
    return out;
}

std::vector<Block> blocks(std::span<const posterior::PosteriorSummary> summaries,
                          const std::vector<std::string>& areas) {
    std::set<std::pair<market::Horizon, std::string>> keys;
    for (const auto& s : summaries) {
        keys.emplace(s.horizon, s.epoch);
    }
    std::vector<Block> out;
    for (const auto& [h, epoch] : keys) {
        Block b{h, epoch, {}};
        for (const Covariate c : kRowOrder) {
            for (const auto& area : areas) {
                std::string cell = "NA";
                for (const auto& s : summaries) {
                    if (s.horizon == h && s.epoch == epoch && s.area == area) {
                        if (const auto i = s.index_of(c); i >= 0) {
                            // Avoid printing "-0.000".
                            const double v = s.beta_hat(i);
                            cell = fmt::format("{:.3f}", std::abs(v) < 0.0005 ? 0.0 : v);
                        }
                    }
                }
                b.cells.push_back(std::move(cell));
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::string row_label(Covariate c) { return fmt::format("beta_{}", market::to_string(c)); }

}  // namespace

void write_coefficient_csv(std::span<const posterior::PosteriorSummary> summaries,
                           const market::MarketPanel& panel, std::ostream& out) {
    const auto areas = observed_areas(panel);
    out << "horizon,epoch,coefficient";
    for (const auto& a : areas) {
        out << ',' << a;
    }
    out << '\n';
    for (const auto& b : blocks(summaries, areas)) {
        for (std::size_t r = 0; r < std::size(kRowOrder); ++r) {
            out << market::to_string(b.horizon) << ',' << b.epoch << ',' << row_label(kRowOrder[r]);
            for (std::size_t k = 0; k < areas.size(); ++k) {
                out << ',' << b.cells[r * areas.size() + k];
            }
            out << '\n';
        }
    }
}

void print_coefficient_table(std::span<const posterior::PosteriorSummary> summaries,
                             const market::MarketPanel& panel, std::ostream& out) {
    const auto areas = observed_areas(panel);
    for (const auto& b : blocks(summaries, areas)) {
        out << fmt::format("{:<10}", market::to_string(b.horizon));
        for (const auto& a : areas) {
            out << fmt::format("{:>9}", a);
        }
        out << fmt::format("   (from {})\n", b.epoch);
        for (std::size_t r = 0; r < std::size(kRowOrder); ++r) {
            out << fmt::format("{:<10}", row_label(kRowOrder[r]));
            for (std::size_t k = 0; k < areas.size(); ++k) {
                out << fmt::format("{:>9}", b.cells[r * areas.size() + k]);
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace areacfd::service
