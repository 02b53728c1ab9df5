#include "spfcast/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spfcast/numeric.hpp"

namespace spfcast {

double crps_gaussian(const Gaussian& dist, double y) noexcept {
    double z = (y - dist.mu) / dist.sigma;
    return dist.sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - kInvSqrtPi);
}

double crps_tpn(const TwoPieceNormal& dist, double y) noexcept {
    const double s1 = dist.sigma1, s2 = dist.sigma2;
    const double s = s1 + s2;
    const double dy = y - dist.mu;
    if (dy <= 0.0) {
        double z = dy / s1;
        return 4.0 * s1 * s1 / s * (z * normal_cdf(z) + normal_pdf(z)) - dy +
               2.0 * kInvSqrtPi *
                   (std::sqrt(2.0) * s2 * (s2 * s2 - s1 * s1) - (s1 * s1 * s1 + s2 * s2 * s2)) /
                   (s * s);
    }
    double z = dy / s2;
    return 4.0 * s2 * s2 / s * (z * normal_cdf(z) + normal_pdf(z)) +
           ((s1 - s2) * (s1 - s2) - 4.0 * s2 * s2) / (s * s) * dy +
           2.0 * kInvSqrtPi *
               (std::sqrt(2.0) * s1 * (s1 * s1 - s2 * s2) - (s1 * s1 * s1 + s2 * s2 * s2)) /
               (s * s);
}

namespace {

// A(m, s^2) = E|X - Y| for X ~ N(m, s^2) against a point at the origin:
// m(2*Phi(m/s) - 1) + 2*s*phi(m/s).
double gaussian_abs_moment(double m, double s) noexcept {
    double z = m / s;
    return m * (2.0 * normal_cdf(z) - 1.0) + 2.0 * s * normal_pdf(z);
}

}  // namespace

double crps_mixture(const GaussianMixture2& dist, double y) noexcept {
    const double w[2] = {dist.alpha, 1.0 - dist.alpha};
    const double mu[2] = {dist.c1.mu, dist.c2.mu};
    const double sg[2] = {dist.c1.sigma, dist.c2.sigma};
    double first = 0.0, second = 0.0;
    for (int i = 0; i < 2; ++i) {
        first += w[i] * gaussian_abs_moment(y - mu[i], sg[i]);
        for (int j = 0; j < 2; ++j) {
            second += w[i] * w[j] *
                      gaussian_abs_moment(mu[i] - mu[j], std::sqrt(sg[i] * sg[i] + sg[j] * sg[j]));
        }
    }
    return first - 0.5 * second;
}

double crps_ensemble(const Ensemble& dist, double y) noexcept {
    const auto& x = dist.members;
    const auto m = static_cast<double>(x.size());
    double mean_abs = 0.0;
    for (double v : x) mean_abs += std::abs(v - y);
    mean_abs /= m;
    // Members are sorted: sum_{i,j} |x_i - x_j| = 2 * sum_i (2i + 1 - M) x_i.
    double spread = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        spread += (2.0 * static_cast<double>(i) + 1.0 - m) * x[i];
    }
    spread *= 2.0;
    return mean_abs - spread / (2.0 * m * m);
}

double crps(const PredictiveDistribution& dist, double y) {
    return std::visit(
        [y](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return crps_gaussian(d, y);
            if constexpr (std::is_same_v<T, TwoPieceNormal>) return crps_tpn(d, y);
            if constexpr (std::is_same_v<T, GaussianMixture2>) return crps_mixture(d, y);
            if constexpr (std::is_same_v<T, Ensemble>) return crps_ensemble(d, y);
        },
        dist);
}

namespace {

// Exact integral of (F - 1{x >= y})^2 for a step CDF: the integrand is
// constant between consecutive breakpoints.
double crps_stepwise(const Ensemble& dist, double y) {
    std::vector<double> pts = dist.members;
    pts.push_back(y);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        double f = dist.cdf(pts[k]);
        double h = pts[k] >= y ? 1.0 : 0.0;
        total += (f - h) * (f - h) * (pts[k + 1] - pts[k]);
    }
    return total;
}

}  // namespace

double crps_numeric(const PredictiveDistribution& dist, double y) {
    if (const auto* ens = std::get_if<Ensemble>(&dist)) {
        return crps_stepwise(*ens, y);
    }
    double lo = std::min(y, quantile(dist, 1e-9)) - 1.0;
    double hi = std::max(y, quantile(dist, 1.0 - 1e-9)) + 1.0;
    // Split at the integrand's jump (x = y) and, for the two-piece normal,
    // at the mode where the CDF loses smoothness. Segments never straddle y,
    // so the indicator is constant on each and the jump's one-sided limits
    // are integrated exactly.
    std::vector<double> knots{lo, y, hi};
    if (const auto* tpn = std::get_if<TwoPieceNormal>(&dist)) knots.push_back(tpn->mu);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        double a = std::max(knots[k], lo), b = std::min(knots[k + 1], hi);
        if (!(b > a)) continue;
        const double h = a >= y ? 1.0 : 0.0;
        auto integrand = [&dist, h](double x) {
            double d = cdf(dist, x) - h;
            return d * d;
        };
        total += adaptive_simpson(integrand, a, b, 2.5e-10);
    }
    return total;
}

DmResult dm_test(const ScoreSeries& loss_a, const ScoreSeries& loss_b) {
    if (loss_a.horizon != loss_b.horizon) {
        raise(ErrorCode::Alignment, "loss series have different horizons");
    }
    if (loss_a.origin_quarters.size() != loss_a.values.size() ||
        loss_b.origin_quarters.size() != loss_b.values.size()) {
        raise(ErrorCode::Alignment, "loss series quarters and values differ in length");
    }
    if (loss_a.origin_quarters != loss_b.origin_quarters) {
        raise(ErrorCode::Alignment, "loss series are not aligned on the same origin quarters");
    }
    const auto n = loss_a.values.size();
    if (n < 2) raise(ErrorCode::InsufficientData, "Diebold-Mariano test needs at least 2 losses");

    const auto t_count = static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = loss_a.values[i] - loss_b.values[i];
    double mean = std::accumulate(d.begin(), d.end(), 0.0) / t_count;

    // Rectangular long-run variance: gamma_0 + 2 * sum_{k=1}^{h-1} gamma_k
    // with 1/T-normalized sample autocovariances.
    int max_lag = std::min<int>(loss_a.horizon - 1, static_cast<int>(n) - 1);
    double lrv = 0.0;
    for (int k = 0; k <= max_lag; ++k) {
        double g = 0.0;
        for (std::size_t t = k; t < n; ++t) g += (d[t] - mean) * (d[t - k] - mean);
        g /= t_count;
        lrv += k == 0 ? g : 2.0 * g;
    }

    DmResult out;
    if (lrv <= 0.0) {
        out.degenerate = true;
        out.code = "NA";
        out.reject_by_convention = true;  // variance treated as zero; null rejected
        return out;
    }
    double stat = mean / std::sqrt(lrv / t_count);
    out.statistic = stat;
    out.lower_tail_prob = normal_cdf(stat);
    out.code = encode_tail_probability(*out.lower_tail_prob);
    return out;
}

std::string encode_tail_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        raise(ErrorCode::Domain, "tail probability must lie in [0,1]");
    }
    int code;
    if (p <= 0.01) {
        code = 0;
    } else if (p > 0.99) {
        code = 99;
    } else {
        code = std::clamp(static_cast<int>(std::floor(100.0 * p)), 1, 98);
    }
    char buf[3] = {static_cast<char>('0' + code / 10), static_cast<char>('0' + code % 10), 0};
    return buf;
}

double aggregate(const ScoreSeries& losses) {
    if (losses.values.empty()) {
        raise(ErrorCode::InsufficientData, "cannot aggregate an empty loss series");
    }
    return std::accumulate(losses.values.begin(), losses.values.end(), 0.0) /
           static_cast<double>(losses.values.size());
}

}  // namespace spfcast
