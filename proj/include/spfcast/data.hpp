#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spfcast/distribution.hpp"
#include "spfcast/quarter.hpp"

namespace spfcast {

/// Annualized quarter-over-quarter growth of quarter-averaged index levels:
/// ((z_t / z_{t-1})^4 - 1) * 100.
double growth_rate(double z_curr, double z_prev);

/// Quarterly inflation rates derived from one vintage. rates[i] belongs to
/// quarter first + i; quarters with incomplete months are dropped, so the
/// series always ends at the vintage's last complete quarter.
struct RateSeries {
    Quarter first;
    std::vector<double> rates;

    Quarter last() const { return first + (static_cast<int>(rates.size()) - 1); }
    std::optional<double> at(Quarter q) const;
    /// The `length` rates for quarters (end-length, end]; nullopt when any
    /// of those quarters is missing from the series.
    std::optional<std::vector<double>> window_ending(Quarter end, int length) const;
};

/// Monthly CPI levels keyed by release quarter. Built once by a single
/// writer, frozen, then read concurrently; quarterly rates are precomputed
/// at freeze time.
class VintageStore {
public:
    /// Build phase; records may arrive in any order.
    void add(Quarter vintage, int year, int month, double level);
    /// Validates month contiguity per vintage and the coverage rule (a
    /// vintage never covers months after its release quarter), then derives
    /// quarterly averages and rates. Throws Parse on violations.
    void freeze();
    bool frozen() const noexcept { return frozen_; }

    bool empty() const noexcept { return vintages_.empty(); }
    std::size_t size() const noexcept { return vintages_.size(); }
    bool has_vintage(Quarter v) const;
    std::vector<Quarter> vintages() const;

    /// Rates computed from a vintage's quarter-averaged levels. Throws
    /// MissingVintage / InsufficientData (< 2 complete quarters).
    const RateSeries& rates(Quarter vintage) const;

    /// Greatest vintage released at or before `issue`; throws NoDataYet.
    Quarter latest_vintage_at(Quarter issue) const;

    /// The target quarter's rate as seen from `evaluation_vintage`;
    /// throws PendingObservation when not covered.
    double realized(Quarter target, Quarter evaluation_vintage) const;

    /// Raw monthly coverage, for serialization.
    struct MonthlySeries {
        int first_month = 0;  // month_index
        std::vector<double> levels;
    };
    const std::map<Quarter, MonthlySeries>& monthly() const { return vintages_; }

private:
    std::map<Quarter, MonthlySeries> vintages_;
    std::map<Quarter, std::map<int, double>> building_;
    std::map<Quarter, RateSeries> rates_;
    bool frozen_ = false;
};

/// Survey point forecasts: at most one value per (origin, horizon,
/// forecaster); absence means a missing forecast.
class SurveyPanel {
public:
    void add(Quarter origin, int horizon, const std::string& forecaster_id, double value);
    void freeze();
    bool frozen() const noexcept { return frozen_; }

    std::size_t record_count() const noexcept { return count_; }

    /// Non-missing member values at (origin, horizon), ordered by
    /// forecaster id; empty when none.
    std::vector<double> values(Quarter origin, int horizon) const;
    std::optional<double> value_of(Quarter origin, int horizon, const std::string& id) const;
    /// Every id appearing anywhere in the panel, sorted.
    std::vector<std::string> forecaster_ids() const;

    struct Record {
        Quarter origin;
        int horizon;
        std::string forecaster_id;
        double value;
    };
    /// All records in (origin, horizon, forecaster_id) order.
    std::vector<Record> records() const;

private:
    struct Cell {
        std::vector<std::pair<std::string, double>> entries;  // sorted by id
    };
    std::map<std::pair<int, int>, Cell> cells_;  // (origin index, horizon)
    std::size_t count_ = 0;
    bool frozen_ = false;
};

/// Median (even counts averaged) and n-1 variance of the survey panel at
/// (origin, horizon). Throws InsufficientPanel below two members.
struct PanelSummary {
    double median = 0.0;
    double variance = 0.0;
    int n = 0;
};
PanelSummary spf_summary(const SurveyPanel& panel, Quarter origin, int horizon);

/// Quarterly rates from the vintage in force at `issue`.
const RateSeries& rates_at_issue(Quarter issue, const VintageStore& store);

/// The `length` most recent rates available at `issue`, as an ensemble. Its
/// median is the probabilistic no-change point forecast. Throws
/// InsufficientHistory when the vintage supplies fewer rates.
Ensemble pnc_window(Quarter issue, int length, const VintageStore& store);

/// Postprocessing covariates for one (origin, horizon) case: survey
/// median/variance plus the no-change window median/variance, and the
/// outcome when observed.
struct CovariateRow {
    Quarter origin;
    int horizon = 1;
    double mu_spf = 0.0;
    double sigma2_spf = 0.0;
    double mu_pnc = 0.0;
    double sigma2_pnc = 0.0;
    std::optional<double> realized;
};

/// Builds the covariate row for `origin` from the information set of the
/// `issue` quarter: survey stats come from the panel, the no-change stats
/// from the issue vintage's rates ending at origin-1, and the realized
/// value (when its target is already covered) from the same rate series.
/// Returns nullopt when the panel has fewer than two members or the rate
/// history is too short.
std::optional<CovariateRow> covariate_row(Quarter origin, int horizon, Quarter issue,
                                          const VintageStore& store, const SurveyPanel& panel,
                                          int pnc_length);

}  // namespace spfcast
