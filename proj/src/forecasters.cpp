#include "spfcast/forecasters.hpp"

#include <algorithm>
#include <cmath>

#include "spfcast/errors.hpp"

namespace spfcast {

const char* method_id(Method m) noexcept {
    switch (m) {
        case Method::Spf: return "spf";
        case Method::SpfMse: return "spf_mse";
        case Method::Pnc: return "pnc";
        case Method::Tnc: return "tnc";
        case Method::Hr1: return "hr1";
        case Method::Hr2: return "hr2";
        case Method::Gm1: return "gm1";
        case Method::Gm2: return "gm2";
    }
    return "?";
}

const char* method_display_name(Method m) noexcept {
    switch (m) {
        case Method::Spf: return "SPF";
        case Method::SpfMse: return "SPF median with MSE";
        case Method::Pnc: return "Probabilistic no-change";
        case Method::Tnc: return "Traditional no-change";
        case Method::Hr1: return "HR with SPF covariates";
        case Method::Hr2: return "HR with SPF and PNC covariates";
        case Method::Gm1: return "GM";
        case Method::Gm2: return "GM with variance adjustment";
    }
    return "?";
}

std::optional<Method> method_from_id(std::string_view id) noexcept {
    for (Method m : all_methods()) {
        if (id == method_id(m)) return m;
    }
    return std::nullopt;
}

std::vector<Method> all_methods() {
    return {Method::Spf, Method::SpfMse, Method::Pnc,  Method::Tnc,
            Method::Hr1, Method::Hr2,    Method::Gm1, Method::Gm2};
}

HrParams HrParams::identity(HrVariant variant) {
    HrParams p;
    p.variant = variant;
    return p;  // a=0, b1=1, d11=d21=1, everything else 0
}

void HrParams::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            raise(ErrorCode::InvalidArgument,
                  std::string("variance coefficient ") + name + " must be >= 0");
        }
    };
    nonneg(c1, "c1");
    nonneg(d11, "d11");
    nonneg(d12, "d12");
    nonneg(c2, "c2");
    nonneg(d21, "d21");
    nonneg(d22, "d22");
    if (!std::isfinite(a) || !std::isfinite(b1) || !std::isfinite(b2)) {
        raise(ErrorCode::InvalidArgument, "location coefficients must be finite");
    }
    if (variant == HrVariant::SpfOnly && (b2 != 0.0 || d12 != 0.0 || d22 != 0.0)) {
        raise(ErrorCode::InvalidArgument,
              "SPF-only variant requires b2 = d12 = d22 = 0");
    }
}

void GmParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "mixture weight must lie in [0,1]");
    }
    bool has_sigmas = sigma1.has_value() && sigma2.has_value();
    if (variant == GmVariant::VarianceAdjusted) {
        if (!has_sigmas || !(*sigma1 > 0.0) || !(*sigma2 > 0.0)) {
            raise(ErrorCode::InvalidArgument,
                  "variance-adjusted mixture requires positive sigma1 and sigma2");
        }
    } else if (sigma1 || sigma2) {
        raise(ErrorCode::InvalidArgument, "standard mixture carries no free sigmas");
    }
}

double MseState::mse() const {
    if (squared_errors.empty()) {
        raise(ErrorCode::InsufficientHistory, "empty MSE window");
    }
    double sum = 0.0;
    for (double e : squared_errors) sum += e;
    return sum / static_cast<double>(squared_errors.size());
}

Forecast traditional_no_change(Quarter issue, int horizon, const VintageStore& store,
                               const MseState& mse) {
    (void)horizon;  // the point forecast ignores it; the window was built per horizon
    const RateSeries& rs = rates_at_issue(issue, store);
    double point = rs.rates.back();
    return {Gaussian(point, std::sqrt(mse.mse())), point};
}

Forecast probabilistic_no_change(Quarter issue, int length, const VintageStore& store) {
    Ensemble window = pnc_window(issue, length, store);
    double point = window.median();
    return {std::move(window), point};
}

Forecast spf_ensemble(Quarter origin, int horizon, const SurveyPanel& panel) {
    std::vector<double> members = panel.values(origin, horizon);
    if (members.size() < 2) {
        raise(ErrorCode::InsufficientPanel, "panel at " + origin.str() + " horizon " +
                                                std::to_string(horizon) + " has " +
                                                std::to_string(members.size()) + " member(s)");
    }
    Ensemble dist(std::move(members));
    double point = dist.median();
    return {std::move(dist), point};
}

Forecast spf_median_mse(Quarter origin, int horizon, const SurveyPanel& panel,
                        const MseState& mse, MseScale scale) {
    PanelSummary s = spf_summary(panel, origin, horizon);
    double m = mse.mse();
    double sigma = scale == MseScale::Rmse ? std::sqrt(m) : m;
    return {Gaussian(s.median, sigma), s.median};
}

TwoPieceNormal hr_predict(const HrParams& params, const CovariateRow& row) {
    params.validate();
    if (row.sigma2_spf < 0.0 || row.sigma2_pnc < 0.0) {
        raise(ErrorCode::InvalidArgument, "covariate variances must be >= 0");
    }
    double mu = params.a + params.b1 * row.mu_spf + params.b2 * row.mu_pnc;
    double var1 = params.c1 + params.d11 * row.sigma2_spf + params.d12 * row.sigma2_pnc;
    double var2 = params.c2 + params.d21 * row.sigma2_spf + params.d22 * row.sigma2_pnc;
    return TwoPieceNormal(mu, std::sqrt(var1), std::sqrt(var2));
}

GaussianMixture2 gm_predict(const GmParams& params, const CovariateRow& row) {
    params.validate();
    double s1, s2;
    if (params.variant == GmVariant::Standard) {
        s1 = std::sqrt(row.sigma2_spf);
        s2 = std::sqrt(row.sigma2_pnc);
    } else {
        s1 = *params.sigma1;
        s2 = *params.sigma2;
    }
    return GaussianMixture2(params.alpha, row.mu_spf, s1, row.mu_pnc, s2);
}

MseState tnc_mse_window(Quarter issue, int horizon, int window, int min_count,
                        const VintageStore& store) {
    const RateSeries& rs = rates_at_issue(issue, store);
    MseState state;
    state.window = window;
    // h-step no-change backcast over the vintage's own series: the forecast
    // of quarter q is rate(q-h); take the last `window` targets.
    int n = static_cast<int>(rs.rates.size());
    int first_target = std::max(horizon, n - window);
    for (int t = first_target; t < n; ++t) {
        double err = rs.rates[t] - rs.rates[t - horizon];
        state.squared_errors.push_back(err * err);
    }
    if (state.count() < min_count) {
        raise(ErrorCode::InsufficientHistory,
              "no-change error window at " + issue.str() + " horizon " +
                  std::to_string(horizon) + " holds " + std::to_string(state.count()) +
                  " error(s), need " + std::to_string(min_count));
    }
    return state;
}

MseState spf_mse_window(Quarter issue, int horizon, int window, int min_count,
                        const VintageStore& store, const SurveyPanel& panel) {
    const RateSeries& rs = rates_at_issue(issue, store);
    MseState state;
    state.window = window;
    // Targets strictly before the issue quarter, newest last; each target's
    // forecast is the survey median issued at target - (h-1).
    Quarter last_target = std::min(issue - 1, rs.last());
    std::vector<double> collected;
    for (Quarter target = last_target; static_cast<int>(collected.size()) < window;
         target = target - 1) {
        auto rate = rs.at(target);
        if (!rate) break;  // ran off the front of the series
        Quarter origin = target - (horizon - 1);
        std::vector<double> members = panel.values(origin, horizon);
        if (members.size() < 2) continue;  // missing survey; skip this target
        std::sort(members.begin(), members.end());
        std::size_t n = members.size();
        double med = n % 2 == 1 ? members[n / 2] : 0.5 * (members[n / 2 - 1] + members[n / 2]);
        double err = *rate - med;
        collected.push_back(err * err);
        if (target.index() == 0) break;
    }
    // collected is newest-first; store oldest-first.
    state.squared_errors.assign(collected.rbegin(), collected.rend());
    if (state.count() < min_count) {
        raise(ErrorCode::InsufficientHistory,
              "survey error window at " + issue.str() + " horizon " + std::to_string(horizon) +
                  " holds " + std::to_string(state.count()) + " error(s), need " +
                  std::to_string(min_count));
    }
    return state;
}

}  // namespace spfcast
