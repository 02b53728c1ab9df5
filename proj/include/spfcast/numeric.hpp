#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace spfcast {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/sqrt(pi)

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF via erfc; absolute error below 1e-14 across the
/// real line, which the CRPS closed forms rely on in the tails.
double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF. Rational initial guess refined by two
/// Halley steps against normal_cdf; p must lie in (0,1).
double normal_quantile(double p);

/// Recursive adaptive Simpson quadrature with Richardson acceptance.
/// `tol` is the absolute error target for [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 52);

/// Small deterministic RNG (splitmix64). Used wherever reproducibility
/// across runs and platforms must be byte-exact, which rules out the
/// implementation-defined std:: distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
    std::uint64_t next() noexcept;
    /// Uniform on [0,1) with 53 random bits.
    double next_double() noexcept;
    /// Uniform on [lo, hi).
    double next_double(double lo, double hi) noexcept;

private:
    std::uint64_t state_;
};

/// Order-independent 64-bit seed mix for (origin, horizon, salt) triples.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) noexcept;

/// Round to two decimals, ties to even; table rendering only, aggregates
/// are kept at full precision everywhere else.
double round2_half_even(double v) noexcept;

/// FNV-1a over a byte buffer; used to fingerprint input data in run metadata.
std::uint64_t fnv1a64(const void* data, std::size_t len) noexcept;
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace spfcast
