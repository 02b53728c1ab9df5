#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spfcast/data.hpp"
#include "spfcast/distribution.hpp"

namespace spfcast {

/// The compared forecast methods.
enum class Method {
    Spf,     // survey panel as a discrete predictive distribution; median point
    SpfMse,  // Gaussian around the survey median, spread from its past MSE
    Pnc,     // probabilistic no-change: empirical window distribution
    Tnc,     // traditional no-change: Gaussian around the last observed rate
    Hr1,     // heteroscedastic regression, survey covariates only
    Hr2,     // heteroscedastic regression, survey + no-change covariates
    Gm1,     // Gaussian mixture, weight only
    Gm2,     // Gaussian mixture with variance adjustment
};

const char* method_id(Method m) noexcept;          // "spf", "hr2", ...
const char* method_display_name(Method m) noexcept;
std::optional<Method> method_from_id(std::string_view id) noexcept;
std::vector<Method> all_methods();

/// How the survey-median-with-MSE method turns its error window into a
/// Gaussian scale. Rmse uses sqrt(MSE) (a quantity in percentage points);
/// Mse uses the raw MSE as the scale.
enum class MseScale { Rmse, Mse };

struct HrVariantTag {};
enum class HrVariant { SpfOnly, SpfPnc };

/// Coefficients of the heteroscedastic regression map from covariates to a
/// two-piece normal:
///   mu      = a + b1*mu_spf + b2*mu_pnc
///   sigma1^2 = c1 + d11*sigma2_spf + d12*sigma2_pnc
///   sigma2^2 = c2 + d21*sigma2_spf + d22*sigma2_pnc
/// Variance coefficients are nonnegative; the SpfOnly variant pins
/// b2 = d12 = d22 = 0.
struct HrParams {
    HrVariant variant = HrVariant::SpfPnc;
    double a = 0.0, b1 = 1.0, b2 = 0.0;
    double c1 = 0.0, d11 = 1.0, d12 = 0.0;
    double c2 = 0.0, d21 = 1.0, d22 = 0.0;

    /// Pass-through start: reproduces the survey ensemble's moments.
    static HrParams identity(HrVariant variant);
    /// Throws InvalidArgument on negative variance coefficients or a
    /// violated variant constraint.
    void validate() const;
};

enum class GmVariant { Standard, VarianceAdjusted };

/// Mixture weight (and, for the variance-adjusted variant, shared component
/// scales); the component means are always the row's survey and no-change
/// medians.
struct GmParams {
    GmVariant variant = GmVariant::Standard;
    double alpha = 0.5;
    std::optional<double> sigma1;  // set iff VarianceAdjusted
    std::optional<double> sigma2;

    void validate() const;
};

/// Rolling window of past squared errors for one (method, horizon); only
/// errors whose targets are realized strictly before the issue quarter are
/// admitted.
struct MseState {
    std::vector<double> squared_errors;  // oldest first
    int window = 20;

    int count() const noexcept { return static_cast<int>(squared_errors.size()); }
    double mse() const;
};

/// Point forecast plus predictive distribution for one (origin, horizon).
struct Forecast {
    PredictiveDistribution dist;
    double point = 0.0;
};

/// Gaussian centered on the last rate available at `issue`, scale from the
/// rolling MSE window. Throws InsufficientHistory without a usable vintage.
Forecast traditional_no_change(Quarter issue, int horizon, const VintageStore& store,
                               const MseState& mse);

/// Empirical distribution of the `length` most recent rates; identical for
/// every horizon.
Forecast probabilistic_no_change(Quarter issue, int length, const VintageStore& store);

/// The survey panel as a discrete predictive distribution; point forecast
/// is the member median. Throws InsufficientPanel below two members.
Forecast spf_ensemble(Quarter origin, int horizon, const SurveyPanel& panel);

/// Gaussian around the survey median with spread from the MSE window.
Forecast spf_median_mse(Quarter origin, int horizon, const SurveyPanel& panel,
                        const MseState& mse, MseScale scale = MseScale::Rmse);

/// Applies the regression map to one covariate row.
TwoPieceNormal hr_predict(const HrParams& params, const CovariateRow& row);

/// Mixture anchored at the row's medians; scales from the row (Standard) or
/// from the fitted params (VarianceAdjusted).
GaussianMixture2 gm_predict(const GmParams& params, const CovariateRow& row);

/// Squared h-step no-change errors over the last `window` quarters of the
/// issue vintage's own rate series (rate(q) vs rate(q-h)). Errors whose
/// targets fall at or after `issue` are never included. Throws
/// InsufficientHistory when fewer than `min_count` errors exist.
MseState tnc_mse_window(Quarter issue, int horizon, int window, int min_count,
                        const VintageStore& store);

/// Squared errors of past survey medians at this horizon, over the `window`
/// most recent targets realized before `issue`; outcomes are read from the
/// issue vintage. Origins with fewer than two panel members are skipped.
MseState spf_mse_window(Quarter issue, int horizon, int window, int min_count,
                        const VintageStore& store, const SurveyPanel& panel);

}  // namespace spfcast
