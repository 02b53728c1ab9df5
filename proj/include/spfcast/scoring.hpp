#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spfcast/distribution.hpp"
#include "spfcast/quarter.hpp"

namespace spfcast {

/// CRPS(F, y) = integral of (F(x) - 1{x >= y})^2 dx.
///
/// Closed forms below are the production path; crps_numeric integrates the
/// definition directly and serves as the oracle every closed form is tested
/// against.

/// Gaussian closed form: sigma * [z(2*Phi(z)-1) + 2*phi(z) - 1/sqrt(pi)].
double crps_gaussian(const Gaussian& dist, double y) noexcept;

/// Two-branch closed form for the two-piece normal. Reduces to the Gaussian
/// expression when sigma1 == sigma2.
double crps_tpn(const TwoPieceNormal& dist, double y) noexcept;

/// Two-component Gaussian mixture closed form:
///   sum_i w_i A(y-mu_i, s_i^2) - 1/2 sum_ij w_i w_j A(mu_i-mu_j, s_i^2+s_j^2)
/// with A(m, s^2) = m(2*Phi(m/s)-1) + 2*s*phi(m/s).
double crps_mixture(const GaussianMixture2& dist, double y) noexcept;

/// Kernel form for a discrete ensemble:
///   (1/M) sum_m |x_m - y| - (1/(2 M^2)) sum_mn |x_m - x_n|.
/// Equals the exact stepwise integral of the definition for the empirical CDF.
double crps_ensemble(const Ensemble& dist, double y) noexcept;

/// Dispatch to the closed form matching the variant.
double crps(const PredictiveDistribution& dist, double y);

/// Oracle: direct integration of the definition. Continuous variants use
/// adaptive quadrature over [min(y, q(1e-9)) - 1, max(y, q(1-1e-9)) + 1]
/// split at the integrand's kinks, absolute tolerance 1e-9; the ensemble
/// branch evaluates the piecewise-constant integral exactly.
double crps_numeric(const PredictiveDistribution& dist, double y);

/// Per-origin losses for one method at one horizon.
struct ScoreSeries {
    std::vector<Quarter> origin_quarters;
    std::vector<double> values;
    int horizon = 1;
};

/// Diebold-Mariano test result. `code` is the lower tail probability of the
/// test statistic under the null, encoded as a two-character cell "00".."99",
/// or "NA" when the long-run variance estimate is non-positive; in that case
/// the conventional outcome is to treat the variance as zero and reject.
struct DmResult {
    std::optional<double> statistic;
    std::optional<double> lower_tail_prob;
    std::string code = "NA";
    bool degenerate = false;
    bool reject_by_convention = false;
};

/// Equal-predictive-accuracy test on the differential d_t = loss_a - loss_b.
/// The long-run variance is the rectangular (truncated, unweighted) sum of
/// sample autocovariances to lag h-1; the reference distribution is normal.
/// Series must be aligned: equal quarters and horizons, length >= 2.
DmResult dm_test(const ScoreSeries& loss_a, const ScoreSeries& loss_b);

/// Two-character encoding of a lower tail probability: "00" iff p <= 0.01,
/// "99" iff p > 0.99, otherwise floor(100p) clamped to 01..98.
std::string encode_tail_probability(double p);

/// Arithmetic mean loss; throws InsufficientData on an empty series.
double aggregate(const ScoreSeries& losses);

}  // namespace spfcast
