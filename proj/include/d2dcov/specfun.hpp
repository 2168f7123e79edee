#pragma once

// Special functions used by the coverage expressions: generalized harmonic
// numbers, digamma, polygamma, and the finite Zipf law over file ranks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dcov {

/// Sum_{i=1..n} i^{-s}, accumulated from the smallest term upward.
inline double harmonic_generalized(std::size_t n, double s)
{
    if (n == 0) {
        throw std::invalid_argument("harmonic_generalized: n must be >= 1");
    }
    if (!(s > 0.0)) {
        throw std::invalid_argument("harmonic_generalized: shape must be > 0, got " + std::to_string(s));
    }
    double sum = 0.0;
    for (std::size_t i = n; i >= 1; --i) {
        sum += std::pow(static_cast<double>(i), -s);
    }
    return sum;
}

namespace detail {

// B_2, B_4, ..., B_20
inline constexpr std::array<double, 10> bernoulli_even = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
};

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

}  // namespace detail

/// Digamma for x > 0: upward recurrence to x >= 12, then the asymptotic
/// series ln x - 1/(2x) - sum B_2k / (2k x^2k).
inline double digamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("digamma: argument must be a finite positive number");
    }
    double shift = 0.0;
    while (x < 12.0) {
        shift += 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    double series = 0.0;
    double power = inv2;
    for (std::size_t k = 1; k <= 8; ++k) {
        series += detail::bernoulli_even[k - 1] / (2.0 * k) * power;
        power *= inv2;
    }
    return std::log(x) - 0.5 / x - series - shift;
}

/// psi(a + n) - psi(a) for a > 0, n >= 0.
///
/// For large a both digamma values are close to ln a and their difference
/// cancels, so there the asymptotic series is differenced term by term:
///   log1p(n/a) + n/(2a(a+n)) - sum B_2k/(2k) a^{-2k} expm1(-2k log1p(n/a)).
inline double digamma_difference(double a, double n)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::domain_error("digamma_difference: a must be a finite positive number");
    }
    if (!(n >= 0.0) || !std::isfinite(n)) {
        throw std::domain_error("digamma_difference: n must be finite and non-negative");
    }
    if (a < 12.0) {
        return digamma(a + n) - digamma(a);
    }
    const double l = std::log1p(n / a);
    const double inv2 = 1.0 / (a * a);
    double power = inv2;
    double series = 0.0;
    for (std::size_t k = 1; k <= 8; ++k) {
        const double kk = static_cast<double>(k);
        series += detail::bernoulli_even[k - 1] / (2.0 * kk) * power * std::expm1(-2.0 * kk * l);
        power *= inv2;
    }
    return l + n / (2.0 * a * (a + n)) - series;
}

/// n-th derivative of digamma, n >= 1, x > 0.
///
/// Shifts x upward with psi^(n)(x) = psi^(n)(x+1) + (-1)^{n+1} n! / x^{n+1}
/// until x >= 25, then evaluates
///   (-1)^{n+1} [ (n-1)!/x^n + n!/(2 x^{n+1}) + sum_k B_2k (2k+n-1)!/((2k)! x^{2k+n}) ].
/// All recurrence terms carry the same sign, so the result keeps full
/// relative accuracy.
inline double polygamma(int order, double x)
{
    if (order < 1) {
        throw std::invalid_argument("polygamma: order must be >= 1");
    }
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("polygamma: argument must be a finite positive number");
    }
    const double n = static_cast<double>(order);
    const double n_fact = detail::factorial(order);

    double shift = 0.0;
    while (x < 25.0) {
        shift += n_fact / std::pow(x, n + 1.0);
        x += 1.0;
    }

    double asym = detail::factorial(order - 1) / std::pow(x, n) + n_fact / (2.0 * std::pow(x, n + 1.0));
    const double inv2 = 1.0 / (x * x);
    // coefficient (2k+n-1)!/(2k)! built incrementally
    double ratio = detail::factorial(order + 1) / 2.0;
    double power = std::pow(x, -(n + 2.0));
    for (std::size_t k = 1; k <= detail::bernoulli_even.size(); ++k) {
        const double term = detail::bernoulli_even[k - 1] * ratio * power;
        asym += term;
        if (std::abs(term) < 1e-18 * std::abs(asym)) {
            break;
        }
        const double kk = static_cast<double>(k);
        ratio *= (2.0 * kk + n) * (2.0 * kk + n + 1.0) / ((2.0 * kk + 1.0) * (2.0 * kk + 2.0));
        power *= inv2;
    }
    const double sign = (order % 2 == 1) ? 1.0 : -1.0;
    return sign * (asym + shift);
}

/// Zipf law over ranks 1..N with shape s: pmf k^{-s} / H_{N,s}.
class ZipfLaw {
public:
    ZipfLaw(std::size_t n_files, double shape)
        : n_files_(n_files), shape_(shape), norm_(harmonic_generalized(n_files, shape))
    {
        cdf_.resize(n_files_);
        double acc = 0.0;
        for (std::size_t k = 1; k <= n_files_; ++k) {
            acc += pmf(k);
            cdf_[k - 1] = acc;
        }
        cdf_.back() = 1.0;
    }

    std::size_t n_files() const noexcept { return n_files_; }
    double shape() const noexcept { return shape_; }
    /// H_{N,s}
    double norm() const noexcept { return norm_; }

    double pmf(std::size_t k) const
    {
        if (k < 1 || k > n_files_) {
            throw std::out_of_range("ZipfLaw::pmf: rank " + std::to_string(k) + " outside [1, " +
                                    std::to_string(n_files_) + "]");
        }
        return std::pow(static_cast<double>(k), -shape_) / norm_;
    }

    double cdf(std::size_t k) const
    {
        if (k < 1 || k > n_files_) {
            throw std::out_of_range("ZipfLaw::cdf: rank out of range");
        }
        return cdf_[k - 1];
    }

    /// Inverse-CDF lookup: smallest k with CDF(k) > u, for u in [0, 1).
    std::size_t sample(double u) const
    {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            return n_files_;
        }
        return static_cast<std::size_t>(it - cdf_.begin()) + 1;
    }

private:
    std::size_t n_files_;
    double shape_;
    double norm_;
    std::vector<double> cdf_;
};

inline double zipf_pmf(const ZipfLaw& law, std::size_t k) { return law.pmf(k); }
inline std::size_t zipf_sample(const ZipfLaw& law, double u) { return law.sample(u); }

}  // namespace d2dcov
