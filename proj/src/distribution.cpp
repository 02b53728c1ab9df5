#include "spfcast/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "spfcast/numeric.hpp"

namespace spfcast {

namespace {

double floored_scale(double sigma, double floor, const char* what) {
    if (!std::isfinite(sigma) || sigma < 0.0) {
        raise(ErrorCode::InvalidArgument, std::string(what) + " scale must be finite and >= 0");
    }
    return std::max(sigma, floor);
}

}  // namespace

Gaussian::Gaussian(double mu_, double sigma_, double sigma_floor)
    : mu(mu_), sigma(floored_scale(sigma_, sigma_floor, "gaussian")) {
    if (!std::isfinite(mu_)) raise(ErrorCode::InvalidArgument, "gaussian location must be finite");
}

double Gaussian::cdf(double y) const noexcept { return normal_cdf((y - mu) / sigma); }

double Gaussian::pdf(double y) const noexcept { return normal_pdf((y - mu) / sigma) / sigma; }

double Gaussian::quantile(double p) const { return mu + sigma * normal_quantile(p); }

TwoPieceNormal::TwoPieceNormal(double mu_, double sigma1_, double sigma2_, double sigma_floor)
    : mu(mu_),
      sigma1(floored_scale(sigma1_, sigma_floor, "two-piece lower")),
      sigma2(floored_scale(sigma2_, sigma_floor, "two-piece upper")) {
    if (!std::isfinite(mu_)) raise(ErrorCode::InvalidArgument, "two-piece mode must be finite");
}

double TwoPieceNormal::cdf(double y) const noexcept {
    double s = sigma1 + sigma2;
    if (y <= mu) {
        return 2.0 * sigma1 / s * normal_cdf((y - mu) / sigma1);
    }
    return (sigma1 - sigma2) / s + 2.0 * sigma2 / s * normal_cdf((y - mu) / sigma2);
}

double TwoPieceNormal::pdf(double y) const noexcept {
    double s = sigma1 + sigma2;
    double scale = y <= mu ? sigma1 : sigma2;
    double z = (y - mu) / scale;
    // sqrt(2/pi)/(sigma1+sigma2) * exp(-z^2/2); both branches agree at mu.
    return 2.0 * kInvSqrt2Pi / s * std::exp(-0.5 * z * z);
}

double TwoPieceNormal::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) raise(ErrorCode::Domain, "quantile level must lie in (0,1)");
    double s = sigma1 + sigma2;
    double p_mode = sigma1 / s;
    if (p <= p_mode) {
        return mu + sigma1 * normal_quantile(p * s / (2.0 * sigma1));
    }
    return mu + sigma2 * normal_quantile((p * s - sigma1 + sigma2) / (2.0 * sigma2));
}

GaussianMixture2::GaussianMixture2(double alpha_, double mu1, double sigma1, double mu2,
                                   double sigma2, double sigma_floor)
    : alpha(alpha_), c1(mu1, sigma1, sigma_floor), c2(mu2, sigma2, sigma_floor) {
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "mixture weight must lie in [0,1]");
    }
}

double GaussianMixture2::cdf(double y) const noexcept {
    return alpha * c1.cdf(y) + (1.0 - alpha) * c2.cdf(y);
}

double GaussianMixture2::pdf(double y) const noexcept {
    return alpha * c1.pdf(y) + (1.0 - alpha) * c2.pdf(y);
}

double GaussianMixture2::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) raise(ErrorCode::Domain, "quantile level must lie in (0,1)");
    double smax = std::max(c1.sigma, c2.sigma);
    double lo = std::min(c1.mu, c2.mu) - 10.0 * smax;
    double hi = std::max(c1.mu, c2.mu) + 10.0 * smax;
    while (cdf(lo) > p) lo -= (hi - lo);
    while (cdf(hi) < p) hi += (hi - lo);
    // Bisection to 1e-10 in the argument.
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Ensemble::Ensemble(std::vector<double> values) : members(std::move(values)) {
    if (members.empty()) raise(ErrorCode::InvalidArgument, "ensemble must be nonempty");
    for (double v : members) {
        if (!std::isfinite(v)) raise(ErrorCode::InvalidArgument, "ensemble members must be finite");
    }
    std::sort(members.begin(), members.end());
}

Ensemble::Ensemble(std::span<const double> values)
    : Ensemble(std::vector<double>(values.begin(), values.end())) {}

double Ensemble::cdf(double y) const noexcept {
    auto it = std::upper_bound(members.begin(), members.end(), y);
    return static_cast<double>(it - members.begin()) / static_cast<double>(members.size());
}

double Ensemble::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) raise(ErrorCode::Domain, "quantile level must lie in (0,1)");
    const auto m = static_cast<double>(members.size());
    double pos = p * m;
    auto k = static_cast<std::size_t>(std::ceil(pos));
    if (std::abs(pos - std::round(pos)) < 1e-12 && k >= 1 && k < members.size()) {
        return 0.5 * (members[k - 1] + members[k]);
    }
    k = std::min(std::max<std::size_t>(k, 1), members.size());
    return members[k - 1];
}

double cdf(const PredictiveDistribution& dist, double y) {
    return std::visit([y](const auto& d) { return d.cdf(y); }, dist);
}

double pdf(const PredictiveDistribution& dist, double y) {
    if (std::holds_alternative<Ensemble>(dist)) {
        raise(ErrorCode::Unsupported, "pdf is undefined for a discrete ensemble");
    }
    return std::visit(
        [y](const auto& d) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Ensemble>) {
                return 0.0;  // unreachable
            } else {
                return d.pdf(y);
            }
        },
        dist);
}

double quantile(const PredictiveDistribution& dist, double p) {
    return std::visit([p](const auto& d) { return d.quantile(p); }, dist);
}

}  // namespace spfcast
