#include "spfcast/data.hpp"

#include <algorithm>
#include <cmath>

#include "spfcast/errors.hpp"

namespace spfcast {

double growth_rate(double z_curr, double z_prev) {
    if (!(z_prev > 0.0) || !(z_curr > 0.0)) {
        raise(ErrorCode::InvalidArgument, "index levels must be positive");
    }
    double ratio = z_curr / z_prev;
    return (ratio * ratio * ratio * ratio - 1.0) * 100.0;
}

std::optional<double> RateSeries::at(Quarter q) const {
    int offset = q - first;
    if (offset < 0 || offset >= static_cast<int>(rates.size())) return std::nullopt;
    return rates[offset];
}

std::optional<std::vector<double>> RateSeries::window_ending(Quarter end, int length) const {
    if (length < 1) return std::nullopt;
    int last_offset = end - first;
    int first_offset = last_offset - length + 1;
    if (first_offset < 0 || last_offset >= static_cast<int>(rates.size())) return std::nullopt;
    return std::vector<double>(rates.begin() + first_offset, rates.begin() + last_offset + 1);
}

void VintageStore::add(Quarter vintage, int year, int month, double level) {
    if (frozen_) raise(ErrorCode::InvalidArgument, "store is frozen");
    if (!(level > 0.0) || !std::isfinite(level)) {
        raise(ErrorCode::Parse, "CPI level must be a positive number");
    }
    int midx = month_index(year, month);
    auto [it, inserted] = building_[vintage].emplace(midx, level);
    if (!inserted && it->second != level) {
        raise(ErrorCode::Parse, "conflicting levels for vintage " + vintage.str() + " month " +
                                    month_index_str(midx));
    }
}

void VintageStore::freeze() {
    if (frozen_) return;
    for (auto& [vintage, months] : building_) {
        MonthlySeries series;
        series.first_month = months.begin()->first;
        int expected = series.first_month;
        for (const auto& [midx, level] : months) {
            if (midx != expected) {
                raise(ErrorCode::Parse, "vintage " + vintage.str() + " has a gap at month " +
                                            month_index_str(expected));
            }
            series.levels.push_back(level);
            ++expected;
        }
        int last_midx = expected - 1;
        if (quarter_of_month_index(last_midx) > vintage) {
            raise(ErrorCode::Parse, "vintage " + vintage.str() + " covers month " +
                                        month_index_str(last_midx) +
                                        " after its release quarter");
        }
        vintages_.emplace(vintage, std::move(series));
    }
    building_.clear();

    // Quarter-average complete quarters, then derive growth rates.
    for (const auto& [vintage, series] : vintages_) {
        std::vector<std::pair<Quarter, double>> averages;
        int m = series.first_month;
        std::size_t i = 0;
        while (i < series.levels.size()) {
            Quarter q = quarter_of_month_index(m + static_cast<int>(i));
            int q_start = q.index() * 3;  // month index of the quarter's first month
            if (m + static_cast<int>(i) != q_start) {
                ++i;  // partially observed leading quarter; drop it
                continue;
            }
            if (i + 3 > series.levels.size()) break;  // trailing incomplete quarter
            double avg = (series.levels[i] + series.levels[i + 1] + series.levels[i + 2]) / 3.0;
            averages.emplace_back(q, avg);
            i += 3;
        }
        if (averages.size() >= 2) {
            RateSeries rs;
            rs.first = averages[1].first;
            for (std::size_t k = 1; k < averages.size(); ++k) {
                rs.rates.push_back(growth_rate(averages[k].second, averages[k - 1].second));
            }
            rates_.emplace(vintage, std::move(rs));
        }
    }
    frozen_ = true;
}

bool VintageStore::has_vintage(Quarter v) const { return vintages_.count(v) > 0; }

std::vector<Quarter> VintageStore::vintages() const {
    std::vector<Quarter> out;
    out.reserve(vintages_.size());
    for (const auto& [v, _] : vintages_) out.push_back(v);
    return out;
}

const RateSeries& VintageStore::rates(Quarter vintage) const {
    if (!frozen_) raise(ErrorCode::InvalidArgument, "store must be frozen before reads");
    if (!vintages_.count(vintage)) {
        raise(ErrorCode::MissingVintage, "no vintage " + vintage.str());
    }
    auto it = rates_.find(vintage);
    if (it == rates_.end()) {
        raise(ErrorCode::InsufficientData,
              "vintage " + vintage.str() + " has fewer than 2 complete quarters");
    }
    return it->second;
}

Quarter VintageStore::latest_vintage_at(Quarter issue) const {
    if (!frozen_) raise(ErrorCode::InvalidArgument, "store must be frozen before reads");
    if (vintages_.empty()) raise(ErrorCode::NoDataYet, "store holds no vintages");
    auto it = vintages_.upper_bound(issue);
    if (it == vintages_.begin()) {
        raise(ErrorCode::NoDataYet, "no vintage released at or before " + issue.str());
    }
    return std::prev(it)->first;
}

double VintageStore::realized(Quarter target, Quarter evaluation_vintage) const {
    const RateSeries& rs = rates(evaluation_vintage);
    auto rate = rs.at(target);
    if (!rate) {
        raise(ErrorCode::PendingObservation, "vintage " + evaluation_vintage.str() +
                                                 " does not cover quarter " + target.str());
    }
    return *rate;
}

void SurveyPanel::add(Quarter origin, int horizon, const std::string& forecaster_id,
                      double value) {
    if (frozen_) raise(ErrorCode::InvalidArgument, "panel is frozen");
    if (horizon < 1 || horizon > 5) {
        raise(ErrorCode::Parse, "horizon must be 1..5, got " + std::to_string(horizon));
    }
    if (!std::isfinite(value)) raise(ErrorCode::Parse, "forecast value must be finite");
    auto& cell = cells_[{origin.index(), horizon}];
    auto it = std::lower_bound(cell.entries.begin(), cell.entries.end(), forecaster_id,
                               [](const auto& e, const std::string& id) { return e.first < id; });
    if (it != cell.entries.end() && it->first == forecaster_id) {
        raise(ErrorCode::Parse, "duplicate record for forecaster " + forecaster_id + " at " +
                                    origin.str() + " horizon " + std::to_string(horizon));
    }
    cell.entries.insert(it, {forecaster_id, value});
    ++count_;
}

void SurveyPanel::freeze() { frozen_ = true; }

std::vector<double> SurveyPanel::values(Quarter origin, int horizon) const {
    auto it = cells_.find({origin.index(), horizon});
    if (it == cells_.end()) return {};
    std::vector<double> out;
    out.reserve(it->second.entries.size());
    for (const auto& [_, v] : it->second.entries) out.push_back(v);
    return out;
}

std::optional<double> SurveyPanel::value_of(Quarter origin, int horizon,
                                            const std::string& id) const {
    auto it = cells_.find({origin.index(), horizon});
    if (it == cells_.end()) return std::nullopt;
    const auto& entries = it->second.entries;
    auto eit = std::lower_bound(entries.begin(), entries.end(), id,
                                [](const auto& e, const std::string& s) { return e.first < s; });
    if (eit == entries.end() || eit->first != id) return std::nullopt;
    return eit->second;
}

std::vector<std::string> SurveyPanel::forecaster_ids() const {
    std::vector<std::string> ids;
    for (const auto& [_, cell] : cells_) {
        for (const auto& [id, __] : cell.entries) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::vector<SurveyPanel::Record> SurveyPanel::records() const {
    std::vector<Record> out;
    out.reserve(count_);
    for (const auto& [key, cell] : cells_) {
        for (const auto& [id, value] : cell.entries) {
            out.push_back({Quarter::from_index(key.first), key.second, id, value});
        }
    }
    return out;
}

namespace {

double median_of_sorted(const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PanelSummary spf_summary(const SurveyPanel& panel, Quarter origin, int horizon) {
    std::vector<double> v = panel.values(origin, horizon);
    if (v.size() < 2) {
        raise(ErrorCode::InsufficientPanel, "panel at " + origin.str() + " horizon " +
                                                std::to_string(horizon) + " has " +
                                                std::to_string(v.size()) + " member(s)");
    }
    std::sort(v.begin(), v.end());
    PanelSummary out;
    out.n = static_cast<int>(v.size());
    out.median = median_of_sorted(v);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.variance = ss / static_cast<double>(v.size() - 1);  // n-1 denominator
    return out;
}

const RateSeries& rates_at_issue(Quarter issue, const VintageStore& store) {
    return store.rates(store.latest_vintage_at(issue));
}

Ensemble pnc_window(Quarter issue, int length, const VintageStore& store) {
    if (length < 1) raise(ErrorCode::InvalidArgument, "window length must be positive");
    const RateSeries& rs = rates_at_issue(issue, store);
    if (static_cast<int>(rs.rates.size()) < length) {
        raise(ErrorCode::InsufficientHistory,
              "vintage at " + issue.str() + " supplies " + std::to_string(rs.rates.size()) +
                  " rates, need " + std::to_string(length));
    }
    return Ensemble(std::vector<double>(rs.rates.end() - length, rs.rates.end()));
}

std::optional<CovariateRow> covariate_row(Quarter origin, int horizon, Quarter issue,
                                          const VintageStore& store, const SurveyPanel& panel,
                                          int pnc_length) {
    std::vector<double> members = panel.values(origin, horizon);
    if (members.size() < 2) return std::nullopt;

    const RateSeries& rs = rates_at_issue(issue, store);
    // The rates the no-change forecaster would have had at `origin`, as seen
    // from the issue vintage: the window ends one quarter before the origin,
    // or at the series end if the vintage lags further.
    Quarter window_end = std::min(origin - 1, rs.last());
    auto window = rs.window_ending(window_end, pnc_length);
    if (!window) return std::nullopt;

    CovariateRow row;
    row.origin = origin;
    row.horizon = horizon;

    std::sort(members.begin(), members.end());
    row.mu_spf = median_of_sorted(members);
    double mean = 0.0;
    for (double x : members) mean += x;
    mean /= static_cast<double>(members.size());
    double ss = 0.0;
    for (double x : members) ss += (x - mean) * (x - mean);
    row.sigma2_spf = ss / static_cast<double>(members.size() - 1);

    std::vector<double> w = *window;
    std::sort(w.begin(), w.end());
    row.mu_pnc = median_of_sorted(w);
    double wmean = 0.0;
    for (double x : w) wmean += x;
    wmean /= static_cast<double>(w.size());
    double wss = 0.0;
    for (double x : w) wss += (x - wmean) * (x - wmean);
    row.sigma2_pnc = w.size() > 1 ? wss / static_cast<double>(w.size() - 1) : 0.0;

    row.realized = rs.at(origin + (horizon - 1));
    return row;
}

}  // namespace spfcast
