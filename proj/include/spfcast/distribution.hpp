#pragma once

#include <span>
#include <variant>
#include <vector>

#include "spfcast/errors.hpp"

namespace spfcast {

/// Scale parameters are clamped to this floor at construction. A no-change
/// forecast trained on a constant window has zero empirical MSE and must
/// still produce a scoreable density; at the floor the CRPS collapses to
/// the absolute error.
inline constexpr double kSigmaFloor = 1e-8;

/// Gaussian with mean mu and scale sigma, both in percentage points.
struct Gaussian {
    double mu = 0.0;
    double sigma = 1.0;

    Gaussian() = default;
    Gaussian(double mu_, double sigma_, double sigma_floor = kSigmaFloor);

    double cdf(double y) const noexcept;
    double pdf(double y) const noexcept;
    double quantile(double p) const;
};

/// Two-piece normal: half-normals with scales sigma1 (below the mode) and
/// sigma2 (above it) glued at mu so the density is continuous. Right-skewed
/// when sigma1 < sigma2. CDF at the mode is sigma1/(sigma1+sigma2).
struct TwoPieceNormal {
    double mu = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    TwoPieceNormal() = default;
    TwoPieceNormal(double mu_, double sigma1_, double sigma2_,
                   double sigma_floor = kSigmaFloor);

    double cdf(double y) const noexcept;
    double pdf(double y) const noexcept;
    /// Closed form per branch.
    double quantile(double p) const;
};

/// Convex combination of two Gaussians: weight alpha on component 1.
struct GaussianMixture2 {
    double alpha = 0.5;
    Gaussian c1;
    Gaussian c2;

    GaussianMixture2() = default;
    GaussianMixture2(double alpha_, double mu1, double sigma1, double mu2, double sigma2,
                     double sigma_floor = kSigmaFloor);

    double cdf(double y) const noexcept;
    double pdf(double y) const noexcept;
    /// Bracketed bisection; no closed form exists.
    double quantile(double p) const;
};

/// Discrete distribution putting mass 1/M on each member. Members are kept
/// sorted; construction rejects empty or non-finite input.
struct Ensemble {
    std::vector<double> members;  // sorted ascending

    Ensemble() = default;
    explicit Ensemble(std::vector<double> values);
    explicit Ensemble(std::span<const double> values);

    std::size_t size() const noexcept { return members.size(); }
    /// Empirical step CDF: #{members <= y} / M.
    double cdf(double y) const noexcept;
    /// Order statistic at p; when p*M lands on an integer the two adjacent
    /// members are averaged, so the even-count median is the midpoint of
    /// the two central members.
    double quantile(double p) const;
    double median() const { return quantile(0.5); }
};

/// The universal forecast object: exactly one variant populated.
using PredictiveDistribution = std::variant<Gaussian, TwoPieceNormal, GaussianMixture2, Ensemble>;

double cdf(const PredictiveDistribution& dist, double y);
/// Throws Unsupported for the (discrete) Ensemble variant.
double pdf(const PredictiveDistribution& dist, double y);
/// p must lie in (0,1); throws Domain otherwise.
double quantile(const PredictiveDistribution& dist, double p);

}  // namespace spfcast
