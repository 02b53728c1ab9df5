#include "spfcast/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spfcast/numeric.hpp"
#include "spfcast/scoring.hpp"

namespace spfcast {

TrainingSet TrainingSet::build(std::vector<CovariateRow> rows, int horizon, int window) {
    for (const auto& row : rows) {
        if (!row.realized) {
            raise(ErrorCode::InvalidArgument,
                  "training row at " + row.origin.str() + " has no realized value");
        }
        if (row.horizon != horizon) {
            raise(ErrorCode::InvalidArgument, "training rows must share one horizon");
        }
    }
    // Canonical order: fits are invariant to collection order.
    std::sort(rows.begin(), rows.end(),
              [](const CovariateRow& a, const CovariateRow& b) { return a.origin < b.origin; });
    TrainingSet out;
    out.rows = std::move(rows);
    out.horizon = horizon;
    out.window = window;
    return out;
}

double hr_objective(const HrParams& params, const TrainingSet& train) {
    double total = 0.0;
    for (const auto& row : train.rows) {
        total += crps_tpn(hr_predict(params, row), *row.realized);
    }
    return total / static_cast<double>(train.rows.size());
}

namespace {

// Unconstrained coordinates: location coefficients pass through, variance
// coefficients are stored as their square roots (coefficient = u^2). The
// SPF-only variant drops b2/d12/d22 from the vector entirely.

std::vector<double> hr_to_unconstrained(const HrParams& p) {
    auto r = [](double v) { return std::sqrt(v); };
    if (p.variant == HrVariant::SpfOnly) {
        return {p.a, p.b1, r(p.c1), r(p.d11), r(p.c2), r(p.d21)};
    }
    return {p.a, p.b1, p.b2, r(p.c1), r(p.d11), r(p.d12), r(p.c2), r(p.d21), r(p.d22)};
}

HrParams hr_from_unconstrained(const std::vector<double>& u, HrVariant variant) {
    auto sq = [](double v) { return v * v; };
    HrParams p;
    p.variant = variant;
    if (variant == HrVariant::SpfOnly) {
        p.a = u[0];
        p.b1 = u[1];
        p.b2 = 0.0;
        p.c1 = sq(u[2]);
        p.d11 = sq(u[3]);
        p.d12 = 0.0;
        p.c2 = sq(u[4]);
        p.d21 = sq(u[5]);
        p.d22 = 0.0;
    } else {
        p.a = u[0];
        p.b1 = u[1];
        p.b2 = u[2];
        p.c1 = sq(u[3]);
        p.d11 = sq(u[4]);
        p.d12 = sq(u[5]);
        p.c2 = sq(u[6]);
        p.d21 = sq(u[7]);
        p.d22 = sq(u[8]);
    }
    return p;
}

struct BfgsOutcome {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
};

constexpr double kGradTol = 1e-6;
constexpr int kMaxIterations = 500;

// Dense BFGS with central finite differences and Armijo backtracking; the
// parameter space is at most nine-dimensional, so explicit loops suffice.
BfgsOutcome bfgs_minimize(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x) {
    const std::size_t n = x.size();
    auto gradient = [&](const std::vector<double>& p) {
        std::vector<double> g(n);
        std::vector<double> q = p;
        for (std::size_t i = 0; i < n; ++i) {
            double h = 1e-6 * std::max(1.0, std::abs(p[i]));
            q[i] = p[i] + h;
            double fp = f(q);
            q[i] = p[i] - h;
            double fm = f(q);
            q[i] = p[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    };

    BfgsOutcome out;
    double fx = f(x);
    if (!std::isfinite(fx)) return out;
    std::vector<double> g = gradient(x);
    out.trace.push_back(fx);

    // Inverse Hessian approximation, started at the identity.
    std::vector<double> h_inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h_inv[i * n + i] = 1.0;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        out.iterations = iter;
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::abs(gi));
        if (gmax < kGradTol) {
            out.converged = true;
            break;
        }

        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dir[i] -= h_inv[i * n + j] * g[j];
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
        if (!(slope < 0.0)) {
            // Lost positive definiteness; restart along steepest descent.
            std::fill(h_inv.begin(), h_inv.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) h_inv[i * n + i] = 1.0;
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dir[i] = -g[i];
                slope += dir[i] * g[i];
            }
            if (!(slope < 0.0)) break;  // zero gradient; handled above next pass
        }

        double step = 1.0;
        double fnew = fx;
        std::vector<double> xnew = x;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xnew[i] = x[i] + step * dir[i];
            fnew = f(xnew);
            if (std::isfinite(fnew) && fnew <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        std::vector<double> gnew = gradient(xnew);
        std::vector<double> s(n), yv(n);
        double ys = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xnew[i] - x[i];
            yv[i] = gnew[i] - g[i];
            ys += yv[i] * s[i];
        }
        if (ys > 1e-12) {
            // H <- (I - r s y') H (I - r y s') + r s s'
            double rho = 1.0 / ys;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) hy[i] += h_inv[i * n + j] * yv[j];
            }
            double yhy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    h_inv[i * n + j] += (rho * rho * yhy + rho) * s[i] * s[j] -
                                        rho * (s[i] * hy[j] + hy[i] * s[j]);
                }
            }
        }
        x = std::move(xnew);
        g = std::move(gnew);
        fx = fnew;
        out.trace.push_back(fx);
    }
    out.x = std::move(x);
    out.value = fx;
    return out;
}

}  // namespace

std::vector<HrParams> hr_multistart(HrVariant variant, std::uint64_t seed) {
    std::vector<HrParams> starts;
    starts.push_back(HrParams::identity(variant));
    SplitMix64 rng(mix_seed(seed, 0x517cc1b727220a95ull));
    for (int k = 0; k < 4; ++k) {
        HrParams p = HrParams::identity(variant);
        p.b1 *= rng.next_double(0.5, 2.0);
        p.d11 *= rng.next_double(0.5, 2.0);
        p.d21 *= rng.next_double(0.5, 2.0);
        // Entries that are zero at the identity must start in the interior:
        // under the squared reparameterization u = 0 is a stationary point
        // of every variance coordinate, so a purely multiplicative jitter
        // could never activate them.
        p.a = rng.next_double(-0.5, 0.5);
        p.c1 = rng.next_double(0.02, 0.4);
        p.c2 = rng.next_double(0.02, 0.4);
        if (variant == HrVariant::SpfPnc) {
            p.b2 = rng.next_double(-0.5, 0.5);
            p.d12 = rng.next_double(0.02, 0.8);
            p.d22 = rng.next_double(0.02, 0.8);
        }
        starts.push_back(p);
    }
    return starts;
}

FitReport fit_hr(const TrainingSet& train, HrVariant variant, std::uint64_t seed) {
    if (train.rows.size() < 10) {
        raise(ErrorCode::InsufficientTraining,
              "regression fit needs >= 10 rows, got " + std::to_string(train.rows.size()));
    }
    auto objective = [&](const std::vector<double>& u) {
        return hr_objective(hr_from_unconstrained(u, variant), train);
    };

    BfgsOutcome best;
    bool any_finite = false;
    for (const HrParams& start : hr_multistart(variant, seed)) {
        std::vector<double> u0 = hr_to_unconstrained(start);
        if (!std::isfinite(objective(u0))) continue;
        any_finite = true;
        BfgsOutcome run = bfgs_minimize(objective, u0);
        if (run.value < best.value) best = std::move(run);
    }
    if (!any_finite || best.x.empty()) {
        raise(ErrorCode::FitFailure, "objective non-finite at every start");
    }

    FitReport report;
    report.params = hr_from_unconstrained(best.x, variant);
    report.trace = std::move(best.trace);
    report.iterations = best.iterations;
    report.converged = best.converged;
    return report;
}

namespace {

double floored(double sigma) { return std::max(sigma, kSigmaFloor); }

double gaussian_density(double y, double mu, double sigma) {
    double s = floored(sigma);
    double z = (y - mu) / s;
    return normal_pdf(z) / s;
}

struct GmCase {
    double y, mu1, mu2, s1, s2;  // s1/s2 used by the standard variant only
};

std::vector<GmCase> gm_cases(const TrainingSet& train) {
    std::vector<GmCase> cases;
    cases.reserve(train.rows.size());
    for (const auto& row : train.rows) {
        cases.push_back({*row.realized, row.mu_spf, row.mu_pnc, std::sqrt(row.sigma2_spf),
                         std::sqrt(row.sigma2_pnc)});
    }
    return cases;
}

double gm_ll(const std::vector<GmCase>& cases, GmVariant variant, double alpha, double sig1,
             double sig2) {
    double ll = 0.0;
    for (const auto& c : cases) {
        double f1 = gaussian_density(c.y, c.mu1, variant == GmVariant::Standard ? c.s1 : sig1);
        double f2 = gaussian_density(c.y, c.mu2, variant == GmVariant::Standard ? c.s2 : sig2);
        double mix = alpha * f1 + (1.0 - alpha) * f2;
        ll += std::log(std::max(mix, 1e-300));
    }
    return ll;
}

}  // namespace

double gm_log_likelihood(const GmParams& params, const TrainingSet& train) {
    params.validate();
    return gm_ll(gm_cases(train), params.variant, params.alpha,
                 params.sigma1.value_or(1.0), params.sigma2.value_or(1.0));
}

FitReport fit_gm_em(const TrainingSet& train, GmVariant variant) {
    if (train.rows.size() < 10) {
        raise(ErrorCode::InsufficientTraining,
              "EM fit needs >= 10 rows, got " + std::to_string(train.rows.size()));
    }
    std::vector<GmCase> cases = gm_cases(train);
    const auto n = static_cast<double>(cases.size());

    // With coinciding components in every row the responsibilities carry no
    // information and the weight is unidentifiable.
    bool identical = true;
    for (const auto& c : cases) {
        bool same_mean = c.mu1 == c.mu2;
        bool same_scale = variant == GmVariant::VarianceAdjusted || c.s1 == c.s2;
        if (!same_mean || !same_scale) {
            identical = false;
            break;
        }
    }

    double alpha = 0.5;
    double sig1 = 1.0, sig2 = 1.0;
    if (variant == GmVariant::VarianceAdjusted) {
        double ss1 = 0.0, ss2 = 0.0;
        for (const auto& c : cases) {
            ss1 += (c.y - c.mu1) * (c.y - c.mu1);
            ss2 += (c.y - c.mu2) * (c.y - c.mu2);
        }
        sig1 = floored(std::sqrt(ss1 / n));
        sig2 = floored(std::sqrt(ss2 / n));
    }

    FitReport report;
    auto finish = [&](bool converged, int iterations, bool degenerate) {
        GmParams p;
        p.variant = variant;
        p.alpha = alpha;
        if (variant == GmVariant::VarianceAdjusted) {
            p.sigma1 = sig1;
            p.sigma2 = sig2;
        }
        report.params = p;
        report.converged = converged;
        report.iterations = iterations;
        report.degenerate = degenerate;
        return report;
    };

    if (identical) {
        alpha = 0.5;
        report.trace.push_back(gm_ll(cases, variant, alpha, sig1, sig2));
        return finish(true, 0, true);
    }

    double ll = gm_ll(cases, variant, alpha, sig1, sig2);
    report.trace.push_back(ll);
    constexpr int kMaxEmIterations = 1000;
    int iter = 0;
    bool converged = false;
    std::vector<double> resp(cases.size());
    for (; iter < kMaxEmIterations; ++iter) {
        // E-step: responsibility of component 1 at the realized value.
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            double f1 =
                gaussian_density(c.y, c.mu1, variant == GmVariant::Standard ? c.s1 : sig1);
            double f2 =
                gaussian_density(c.y, c.mu2, variant == GmVariant::Standard ? c.s2 : sig2);
            double num = alpha * f1;
            double den = num + (1.0 - alpha) * f2;
            resp[i] = den > 0.0 ? num / den : alpha;
        }
        // M-step.
        double rsum = 0.0;
        for (double r : resp) rsum += r;
        alpha = rsum / n;
        if (variant == GmVariant::VarianceAdjusted) {
            double w1 = 0.0, w2 = 0.0, ss1 = 0.0, ss2 = 0.0;
            for (std::size_t i = 0; i < cases.size(); ++i) {
                const auto& c = cases[i];
                w1 += resp[i];
                w2 += 1.0 - resp[i];
                ss1 += resp[i] * (c.y - c.mu1) * (c.y - c.mu1);
                ss2 += (1.0 - resp[i]) * (c.y - c.mu2) * (c.y - c.mu2);
            }
            if (w1 > 0.0) sig1 = floored(std::sqrt(ss1 / w1));
            if (w2 > 0.0) sig2 = floored(std::sqrt(ss2 / w2));
        }
        double ll_new = gm_ll(cases, variant, alpha, sig1, sig2);
        report.trace.push_back(ll_new);
        if (std::abs(ll_new - ll) < 1e-6 * (std::abs(ll) + 1e-12)) {
            converged = true;
            ll = ll_new;
            ++iter;
            break;
        }
        ll = ll_new;
    }
    return finish(converged, iter, false);
}

}  // namespace spfcast
