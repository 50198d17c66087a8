#pragma once

#include "areacfd/date.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace areacfd::market {

enum class Horizon { M1, M2, Q1, Q2, Q3, Y1, Y2, Y3 };

inline constexpr std::array<Horizon, 8> kAllHorizons{Horizon::M1, Horizon::M2, Horizon::Q1, Horizon::Q2,
                                                     Horizon::Q3, Horizon::Y1, Horizon::Y2, Horizon::Y3};

std::string_view to_string(Horizon h);
Horizon parse_horizon(std::string_view text);

/// Regressors of the CfD model. WA is the seasonally adjusted reservoir
/// deviation and only exists for areas with hydro production.
enum class Covariate { FW, SA, SS, WA };

std::string_view to_string(Covariate c);
Covariate parse_covariate(std::string_view text);

/// Column order used by design matrices: FW, SA, SS and WA for hydro areas.
std::vector<Covariate> covariates_for(bool has_hydro);

struct AreaInfo {
    std::string code;
    bool has_hydro = true;
    bool observed_cfd = false;

    bool operator==(const AreaInfo&) const = default;
};

/// Row-level problem found while assembling a panel.
struct Diagnostic {
    std::string code;
    std::string message;
    std::string source;  // "cfd.csv:17" when known
};

/// Values aligned with MarketPanel::dates(). NaN marks a missing observation.
using Series = std::vector<double>;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Span between two consecutive area redefinitions.
struct Epoch {
    std::size_t index = 0;
    DateRange range;

    /// ISO start date; stable across runs and used as the epoch key.
    std::string id() const { return format_date(range.first); }
};

/// Flags each observation whose price equals the previous observation's
/// price exactly. The first observation is never stale.
std::vector<bool> flag_stale(std::span<const double> prices);

class PanelBuilder;

/// Aligned daily market data. Immutable once built.
///
/// The calendar is the set of days with a system spot price. Every other
/// series is keyed on that calendar; working-day series (forwards, CfDs)
/// keep their gaps as missing values.
class MarketPanel {
public:
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<AreaInfo>& areas() const { return areas_; }
    const std::vector<Date>& redefinitions() const { return redefinitions_; }

    bool has_area(std::string_view code) const;
    const AreaInfo& area(std::string_view code) const;

    std::optional<std::size_t> index_of(Date d) const;

    /// Definition periods covering the calendar, split at redefinition dates.
    std::vector<Epoch> epochs() const;
    Epoch epoch_of(Date d) const;

    const Series& system_spot() const { return system_spot_; }
    const Series& area_spot(std::string_view area) const;
    const Series& forward(Horizon h) const;

    /// nullptr when the area has no CfD series for this horizon.
    const Series* cfd(std::string_view area, Horizon h) const;
    const std::vector<bool>* stale(std::string_view area, Horizon h) const;

    /// nullptr for areas without hydro.
    const Series* reservoir_deviation(std::string_view area) const;

    /// Horizons with at least one forward quote.
    std::vector<Horizon> horizons() const;

    bool operator==(const MarketPanel& other) const;

private:
    friend class PanelBuilder;

    std::vector<AreaInfo> areas_;
    std::vector<Date> dates_;
    std::vector<Date> redefinitions_;
    Series system_spot_;
    std::map<std::string, Series, std::less<>> area_spot_;
    std::map<Horizon, Series> forward_;
    std::map<std::pair<std::string, Horizon>, Series> cfd_;
    std::map<std::pair<std::string, Horizon>, std::vector<bool>> stale_;
    std::map<std::string, Series, std::less<>> wa_;
};

/// Collects raw observations and assembles a MarketPanel.
///
/// Duplicate keys throw immediately. Observations that break panel
/// invariants (off-calendar days, CfD at or below minus the forward) are
/// dropped in build() and reported as diagnostics, or thrown when strict.
class PanelBuilder {
public:
    explicit PanelBuilder(std::vector<AreaInfo> areas);

    void add_redefinition(Date d);
    void add_system_spot(Date d, double price, std::string source = {});
    void add_area_spot(std::string_view area, Date d, double price, std::string source = {});
    void add_forward(Horizon h, Date d, double price, std::string source = {});
    void add_cfd(std::string_view area, Horizon h, Date d, double price, std::string source = {});
    void add_reservoir_deviation(std::string_view area, Date d, double value, std::string source = {});

    MarketPanel build(std::vector<Diagnostic>* diagnostics = nullptr, bool strict = false) &&;

private:
    struct Entry {
        double value;
        std::string source;
    };
    using Column = std::map<Date, Entry>;

    const AreaInfo& known_area(std::string_view code) const;
    static void insert(Column& column, Date d, double value, std::string source, std::string_view what);

    std::vector<AreaInfo> areas_;
    std::vector<Date> redefinitions_;
    Column system_spot_;
    std::map<std::string, Column, std::less<>> area_spot_;
    std::map<Horizon, Column> forward_;
    std::map<std::pair<std::string, Horizon>, Column> cfd_;
    std::map<std::string, Column, std::less<>> wa_;
};

struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<Covariate> columns;
    std::vector<Date> dates;
    std::size_t dropped = 0;  // days in range lacking a covariate
};

/// Covariate matrix for one area and horizon over a date range that must
/// lie within one definition period. No intercept column.
DesignMatrix design_matrix(const MarketPanel& panel, std::string_view area, Horizon h, DateRange range);

struct RegressionData {
    DesignMatrix design;
    Eigen::VectorXd y;
};

/// Design matrix restricted to days with an observed CfD (optionally
/// excluding stale closes), with the CfD as response.
RegressionData regression_data(const MarketPanel& panel, std::string_view area, Horizon h, DateRange range,
                               bool drop_stale = false);

struct ReservoirObservation {
    std::string source;  // historical area code
    Date date;
    double fill_pct;
};

/// Which historical reservoir series feeds an area from a given date on.
struct ReservoirMapping {
    std::string area;
    Date from;
    std::string source;
};

/// Fits the seasonal model per historical series, then forward-fills the
/// logit residuals onto `calendar` for every hydro area. Without a mapping
/// entry an area reads the series carrying its own code.
std::map<std::string, Series, std::less<>> reservoir_deviations(std::span<const ReservoirObservation> observations,
                                                                std::span<const AreaInfo> areas,
                                                                std::span<const ReservoirMapping> mapping,
                                                                const std::vector<Date>& calendar);

struct IngestOptions {
    bool strict = false;
    /// Area declarations to use instead of `dir/areas.csv`.
    std::optional<std::filesystem::path> areas_file;
};

struct IngestResult {
    MarketPanel panel;
    std::vector<Diagnostic> diagnostics;
};

/// Reads areas.csv, spot.csv, forward.csv, cfd.csv, redefinitions.csv and
/// either reservoir.csv (raw fill levels, with optional reservoir_map.csv)
/// or wa.csv (already adjusted deviations) from `dir`.
IngestResult ingest(const std::filesystem::path& dir, const IngestOptions& options = {});

/// Writes the canonical form of a panel; ingest() on the output directory
/// reproduces the panel exactly.
void export_panel(const MarketPanel& panel, const std::filesystem::path& dir);

}  // namespace areacfd::market
