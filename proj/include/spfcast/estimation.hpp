#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "spfcast/forecasters.hpp"

namespace spfcast {

/// Covariate rows with observed outcomes, all at one horizon, ordered by
/// origin. Construction normalizes the order so fits are invariant to the
/// order rows were collected in.
struct TrainingSet {
    std::vector<CovariateRow> rows;
    int horizon = 1;
    int window = 40;

    static TrainingSet build(std::vector<CovariateRow> rows, int horizon, int window);
};

/// Fit outcome: parameters, the per-iteration objective trace (mean CRPS for
/// the regression fit, log-likelihood for EM), and convergence bookkeeping.
struct FitReport {
    std::variant<HrParams, GmParams> params;
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;  // EM only: components indistinguishable, weight pinned at 1/2

    const HrParams& hr() const { return std::get<HrParams>(params); }
    const GmParams& gm() const { return std::get<GmParams>(params); }
};

/// Mean CRPS of the regression forecast over a training set; the objective
/// minimized by fit_hr.
double hr_objective(const HrParams& params, const TrainingSet& train);

/// The multistart initial points used by fit_hr for a given seed: the
/// identity parameterization plus four starts with the nonzero identity
/// entries jittered by factors in [0.5, 2]. Exposed so callers can audit
/// that the returned fit beats every start.
std::vector<HrParams> hr_multistart(HrVariant variant, std::uint64_t seed);

/// Minimum-CRPS fit of the regression coefficients by BFGS with central
/// finite differences on an unconstrained reparameterization (nonnegative
/// coefficients stored as square roots). Requires >= 10 rows. The returned
/// objective never exceeds the identity start's.
FitReport fit_hr(const TrainingSet& train, HrVariant variant, std::uint64_t seed = 0);

/// Maximum-likelihood fit of the mixture weight (and shared scales for the
/// variance-adjusted variant) by EM. The log-likelihood trace is
/// nondecreasing; stops on relative change below 1e-6 or 1000 iterations.
/// When every row's two components coincide the weight is unidentifiable
/// and the report comes back degenerate with alpha = 0.5.
FitReport fit_gm_em(const TrainingSet& train, GmVariant variant);

/// Log-likelihood of a mixture parameterization over a training set.
double gm_log_likelihood(const GmParams& params, const TrainingSet& train);

}  // namespace spfcast
