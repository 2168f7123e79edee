#pragma once

// Laplace functional of the thinned, Zipf-marked interferer field, the
// g(x, r_c) variants, average cellular coverage, and the D2D ergodic rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dcov/model.hpp"
#include "d2dcov/quadrature.hpp"
#include "d2dcov/specfun.hpp"

namespace d2dcov {

/// Constants of the s = 10 closed form: B_10 pi^10 = zeta(10), C_10 = 1/9!.
inline constexpr double lower_bound_b10 = 1.0 / 93555.0;
inline constexpr double lower_bound_c10 = 1.0 / 362880.0;

/// Probability that a point of a PPP of the given density has a neighbour
/// within the pairing distance.
inline double retention_prob(double density, double pairing_distance)
{
    if (density < 0.0 || pairing_distance < 0.0) {
        throw std::invalid_argument("retention_prob: density and distance must be non-negative");
    }
    return -std::expm1(-std::numbers::pi * density * pairing_distance * pairing_distance);
}

/// Argument of the interference Laplace transform at one reference link.
///
/// For the cellular uplink the threshold is tau, the transmit power p_c and
/// the distance factor r_c^{alpha(1-eps)}; for the D2D link they are gamma,
/// p_d and r_d^alpha. The normalised interference level at distance x is
/// c(x) = a_const * distance_factor / x^alpha = laplace_arg * p_i / (mu x^alpha).
struct InterferenceKernel {
    double laplace_arg = 0.0;
    double a_const = 0.0;
    double distance_factor = 0.0;
    BoundKind bound;
};

inline InterferenceKernel make_kernel(double threshold, double tx_power, double distance_factor, BoundKind bound,
                                      const ScenarioParams& p)
{
    if (!(tx_power > 0.0)) {
        throw std::invalid_argument("make_kernel: transmit power must be positive");
    }
    if (threshold < 0.0 || distance_factor < 0.0) {
        throw std::invalid_argument("make_kernel: threshold and distance factor must be non-negative");
    }
    InterferenceKernel k;
    k.laplace_arg = threshold / tx_power * distance_factor;
    k.a_const = threshold * p.p_d2d_interferer_w / (tx_power * p.fading_rate);
    k.distance_factor = distance_factor;
    k.bound = bound;

    const double lhs = k.a_const * p.fading_rate;
    const double rhs = threshold / tx_power * p.p_d2d_interferer_w;
    if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(rhs), std::numeric_limits<double>::min())) {
        throw std::logic_error("make_kernel: A mu / p_i disagrees with threshold / power");
    }
    return k;
}

/// Kernel of the cellular uplink at distance r_c from the base station.
inline InterferenceKernel cellular_kernel(const ScenarioParams& p, double r_c, BoundKind bound)
{
    const double factor = std::pow(r_c, p.path_loss_exp * (1.0 - p.power_control));
    return make_kernel(p.sir_threshold_lin, p.p_cellular_w, factor, bound, p);
}

/// Kernel of the D2D link at SIR threshold gamma.
inline InterferenceKernel d2d_kernel(const ScenarioParams& p, double gamma, BoundKind bound)
{
    const double factor = std::pow(p.pairing_distance_m, p.path_loss_exp);
    return make_kernel(gamma, p.p_d2d_tx_w, factor, bound, p);
}

/// B_10 pi^10 - C_10 psi(9, N+1); equals H_{N,10}.
inline double lower_bound_bracket(std::size_t n_files)
{
    return lower_bound_b10 * std::pow(std::numbers::pi, 10) -
           lower_bound_c10 * polygamma(9, static_cast<double>(n_files) + 1.0);
}

/// g(x, r_c) as the direct N-term sum over marks with the kernel's Zipf shape.
inline double g_general(double x, const InterferenceKernel& k, const ScenarioParams& p)
{
    const double s = k.bound.shape;
    const double norm = harmonic_generalized(p.n_files, s);
    const double xa_mu = std::pow(x, p.path_loss_exp) * p.fading_rate;
    const double load = k.laplace_arg * p.p_d2d_interferer_w;
    double sum = 0.0;
    for (std::size_t m = p.n_files; m >= 1; --m) {
        const double md = static_cast<double>(m);
        sum += xa_mu * std::pow(md, 1.0 - s) / ((xa_mu * md + load) * norm);
    }
    return sum;
}

/// s = 1 closed form: [psi(N+1+c) - psi(1+c)] / H_N.
inline double g_ub(double x, const InterferenceKernel& k, const ScenarioParams& p)
{
    const double c = k.a_const * k.distance_factor / std::pow(x, p.path_loss_exp);
    const double n = static_cast<double>(p.n_files);
    // psi(N+1+c) - psi(1+c), differenced without cancellation at large c
    return digamma_difference(1.0 + c, n) / harmonic_generalized(p.n_files, 1.0);
}

/// s = 10 closed form: [B_10 pi^10 - C_10 psi(9, N+1)] / ((1 + c) H_{N,10}).
inline double g_lb(double x, const InterferenceKernel& k, const ScenarioParams& p)
{
    const double c = k.a_const * k.distance_factor / std::pow(x, p.path_loss_exp);
    return lower_bound_bracket(p.n_files) / ((1.0 + c) * harmonic_generalized(p.n_files, 10.0));
}

inline double g_value(double x, const InterferenceKernel& k, const ScenarioParams& p)
{
    switch (k.bound.variant) {
    case BoundKind::Variant::upper:
        return g_ub(x, k, p);
    case BoundKind::Variant::lower:
        return g_lb(x, k, p);
    case BoundKind::Variant::general:
        break;
    }
    return g_general(x, k, p);
}

/// Evaluates 1 - g(x) for one kernel without forming g first.
///
/// In the far tail g -> 1 and a rounding residual in 1 - g would be
/// multiplied by x and integrated to infinity, so each variant uses a
/// cancellation-free form of the complement.
class InterferenceComplement {
public:
    InterferenceComplement(const InterferenceKernel& k, const ScenarioParams& p)
        : variant_(k.bound.variant), alpha_(p.path_loss_exp)
    {
        const double load = k.laplace_arg * p.p_d2d_interferer_w / p.fading_rate;
        c_scale_ = k.a_const * k.distance_factor;
        switch (variant_) {
        case BoundKind::Variant::general: {
            const ZipfLaw law(p.n_files, k.bound.shape);
            for (std::size_t m = 1; m <= p.n_files; ++m) {
                weights_.push_back(law.pmf(m));
                loads_.push_back(load / static_cast<double>(m));
            }
            peak_load_ = load;
            break;
        }
        case BoundKind::Variant::upper: {
            // H_N - [psi(N+1+c) - psi(1+c)] = sum_k (-1)^{k+1} H_{N,k+1} c^k,
            // H_{N,k+1} = (-1)^{k+1} [psi(k,1) - psi(k,N+1)] / k!
            harmonic_ = harmonic_generalized(p.n_files, 1.0);
            n_files_ = static_cast<double>(p.n_files);
            double k_fact = 1.0;
            for (int order = 1; order <= static_cast<int>(taylor_.size()); ++order) {
                k_fact *= order;
                const double sign = (order % 2 == 1) ? 1.0 : -1.0;
                const double h = sign * (polygamma(order, 1.0) - polygamma(order, n_files_ + 1.0)) / k_fact;
                taylor_[order - 1] = sign * h;
            }
            peak_load_ = load;
            break;
        }
        case BoundKind::Variant::lower: {
            const double ratio = lower_bound_bracket(p.n_files) / harmonic_generalized(p.n_files, 10.0);
            if (std::abs(ratio - 1.0) > 1e-12) {
                throw std::logic_error("lower bound bracket differs from H_{N,10}: ratio " + std::to_string(ratio));
            }
            peak_load_ = load;
            break;
        }
        }
    }

    double operator()(double x) const
    {
        const double xa = std::pow(x, alpha_);
        switch (variant_) {
        case BoundKind::Variant::general: {
            double sum = 0.0;
            for (std::size_t i = weights_.size(); i-- > 0;) {
                sum += weights_[i] * loads_[i] / (xa + loads_[i]);
            }
            return sum;
        }
        case BoundKind::Variant::upper: {
            const double c = c_scale_ / xa;
            if (c < 0.05) {
                double sum = 0.0;
                for (std::size_t i = taylor_.size(); i-- > 0;) {
                    sum = sum * c + taylor_[i];
                }
                return sum * c / harmonic_;
            }
            return 1.0 - digamma_difference(1.0 + c, n_files_) / harmonic_;
        }
        case BoundKind::Variant::lower:
            break;
        }
        const double c = c_scale_ / xa;
        return c / (1.0 + c);
    }

    /// Distance where the strongest mark's term changes from saturated to
    /// power-law decay.
    double knee() const { return std::pow(peak_load_, 1.0 / alpha_); }

private:
    BoundKind::Variant variant_;
    double alpha_;
    double c_scale_ = 0.0;
    double peak_load_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> loads_;
    double harmonic_ = 1.0;
    double n_files_ = 1.0;
    std::array<double, 14> taylor_{};
};

/// Integral of [1 - g(x)] x over [R0, field radius].
///
/// Split at the knee; an unbounded tail is mapped to (0, 1] by
/// x = knee u^{-1/(alpha-2)}, which turns the x^{1-alpha} decay into a
/// bounded integrand.
inline QuadResult interference_integral(const InterferenceKernel& k, const ScenarioParams& p,
                                        const QuadratureSpec& quad)
{
    if (k.laplace_arg == 0.0 || p.p_d2d_interferer_w == 0.0) {
        return {};
    }
    const double alpha = p.path_loss_exp;
    const bool unbounded = p.field_unbounded();
    if (unbounded && !(alpha > 2.0)) {
        throw std::domain_error("interference integral diverges for path_loss_exp <= 2 on an unbounded field");
    }
    const InterferenceComplement complement(k, p);
    const double r0 = p.protection_radius_m;
    double knee = std::max(r0, complement.knee());
    if (!unbounded) {
        knee = std::min(knee, p.field_radius_m);
    }

    QuadResult total = gauss_kronrod([&](double x) { return complement(x) * x; }, r0, knee, quad);
    if (!unbounded) {
        total += gauss_kronrod([&](double x) { return complement(x) * x; }, knee, p.field_radius_m, quad);
        return total;
    }
    const double beta = 1.0 / (alpha - 2.0);
    const double scale = beta * knee * knee;
    total += gauss_kronrod(
        [&](double u) {
            const double x = knee * std::pow(u, -beta);
            return complement(x) * scale * std::pow(u, -2.0 * beta - 1.0);
        },
        0.0, 1.0, quad);
    return total;
}

/// Closed form of interference_integral when alpha = 4: each mark
/// contributes (sqrt(b)/2) [atan(R_out^2/sqrt(b)) - atan(R0^2/sqrt(b))].
inline double interference_integral_alpha4(const InterferenceKernel& k, const ScenarioParams& p)
{
    if (p.path_loss_exp != 4.0) {
        throw std::invalid_argument("interference_integral_alpha4 requires path_loss_exp == 4");
    }
    const double load = k.laplace_arg * p.p_d2d_interferer_w / p.fading_rate;
    if (load == 0.0) {
        return 0.0;
    }
    const double r0sq = p.protection_radius_m * p.protection_radius_m;
    auto term = [&](double b) {
        const double root = std::sqrt(b);
        const double upper = p.field_unbounded() ? std::numbers::pi / 2.0
                                                 : std::atan(p.field_radius_m * p.field_radius_m / root);
        return 0.5 * root * (upper - std::atan(r0sq / root));
    };
    if (k.bound.variant == BoundKind::Variant::lower) {
        return term(load);
    }
    const ZipfLaw law(p.n_files, k.bound.shape);
    double sum = 0.0;
    for (std::size_t m = 1; m <= p.n_files; ++m) {
        sum += law.pmf(m) * term(load / static_cast<double>(m));
    }
    return sum;
}

struct LaplaceResult {
    double value = 1.0;
    double abs_error = 0.0;
};

/// L_{I_A}(s) = exp(-2 pi lambda p Int [1 - g] x dx) with its propagated
/// quadrature error.
inline LaplaceResult laplace_ia_with_error(const InterferenceKernel& k, const ScenarioParams& p,
                                           const QuadratureSpec& quad = {})
{
    const double thinned = p.density_per_m2 * retention_prob(p.density_per_m2, p.pairing_distance_m);
    if (thinned == 0.0 || p.p_d2d_interferer_w == 0.0 || k.laplace_arg == 0.0) {
        return {1.0, 0.0};
    }
    const QuadResult inner = interference_integral(k, p, quad);
    const double rate = 2.0 * std::numbers::pi * thinned;
    const double value = std::exp(-rate * inner.value);
    return {value, value * rate * inner.abs_error};
}

inline double laplace_ia(const InterferenceKernel& k, const ScenarioParams& p, const QuadratureSpec& quad = {})
{
    return laplace_ia_with_error(k, p, quad).value;
}

struct CoverageResult {
    double probability = 0.0;
    double error_estimate = 0.0;
};

inline constexpr std::size_t coverage_gauss_order = 128;

/// Average cellular coverage: Int_{R0}^{R} L_{I_A}(s_c(r_c)) 2 r_c / R^2 dr_c.
///
/// Gauss-Legendre of order 128; the difference to order 64 plus the
/// propagated inner-integral error is reported as the error estimate.
inline CoverageResult coverage_cellular(const ScenarioParams& p, BoundKind bound, const QuadratureSpec& quad = {})
{
    const double r0 = p.protection_radius_m;
    const double r = p.cell_radius_m;
    const double half = 0.5 * (r - r0);
    const double mid = 0.5 * (r + r0);

    auto integrate = [&](std::size_t order, double& propagated) {
        const GaussLegendreRule& rule = gauss_legendre(order);
        double sum = 0.0;
        for (std::size_t i = 0; i < order; ++i) {
            const double r_c = mid + half * rule.nodes[i];
            const LaplaceResult l = laplace_ia_with_error(cellular_kernel(p, r_c, bound), p, quad);
            const double weight = rule.weights[i] * half * 2.0 * r_c / (r * r);
            sum += weight * l.value;
            propagated += weight * l.abs_error;
        }
        return sum;
    };

    double propagated_fine = 0.0;
    double propagated_coarse = 0.0;
    const double fine = integrate(coverage_gauss_order, propagated_fine);
    const double coarse = integrate(coverage_gauss_order / 2, propagated_coarse);
    return {fine, std::abs(fine - coarse) + propagated_fine};
}

/// exp(-sigma^2 tau r_c^alpha / p_c): the factor noise would add to the
/// conditional coverage.
inline double noise_negligibility(double noise_power_w, double tau_lin, double p_cellular_w, double r_c, double alpha)
{
    return std::exp(-noise_power_w * tau_lin * std::pow(r_c, alpha) / p_cellular_w);
}

/// Mean distance between two uniform points in a disc of radius R.
inline double mean_disc_distance(double radius) { return 128.0 * radius / (45.0 * std::numbers::pi); }

/// Approximate Laplace transform of the cellular interference at the D2D
/// receiver.
inline double laplace_ic_approx(double gamma, const ScenarioParams& p)
{
    if (gamma < 0.0) {
        throw std::invalid_argument("laplace_ic_approx: gamma must be non-negative");
    }
    const double d = mean_disc_distance(p.cell_radius_m);
    const double rd = p.pairing_distance_m;
    const double ratio = std::pow(gamma * p.p_cellular_w / p.p_d2d_tx_w, 2.0 / p.path_loss_exp);
    return 1.0 / (1.0 + ratio * rd * rd / (d * d));
}

struct RateResult {
    double nats = 0.0;
    double error_estimate = 0.0;

    double bits_per_hz() const { return nats / std::numbers::ln2; }
};

/// Ergodic rate Int_0^inf L_{I_c}(s_d) L_{I_A}(s_d) / (1 + gamma) d gamma in nats.
///
/// Substituting gamma = e^u - 1 removes the 1/(1+gamma) weight. The upper
/// limit U bounds the dropped tail by abs_tol using
/// L_{I_c} <= (2^{2/alpha} / a) e^{-2u/alpha} for u >= ln 2.
inline RateResult ergodic_rate_d2d(const ScenarioParams& p, BoundKind bound, const QuadratureSpec& quad = {})
{
    if (!(p.pairing_distance_m > 0.0)) {
        throw std::domain_error("ergodic_rate_d2d: pairing distance must be positive");
    }
    const double alpha = p.path_loss_exp;
    const double d = mean_disc_distance(p.cell_radius_m);
    const double a = std::pow(p.p_cellular_w / p.p_d2d_tx_w, 2.0 / alpha) * p.pairing_distance_m *
                     p.pairing_distance_m / (d * d);
    const double thinned = p.density_per_m2 * retention_prob(p.density_per_m2, p.pairing_distance_m);
    const bool cellular_silent = !(a > 0.0);
    const bool interference_free = thinned == 0.0 || p.p_d2d_interferer_w == 0.0;

    if (cellular_silent && (interference_free || !p.field_unbounded())) {
        throw std::domain_error("ergodic_rate_d2d: rate unbounded in interference-free model");
    }

    double max_inner_error = 0.0;
    auto integrand = [&](double u) {
        const double gamma = std::expm1(u);
        const LaplaceResult l = laplace_ia_with_error(d2d_kernel(p, gamma, bound), p, quad);
        const double lc = laplace_ic_approx(gamma, p);
        max_inner_error = std::max(max_inner_error, lc * l.abs_error);
        return lc * l.value;
    };

    double upper;
    if (!cellular_silent) {
        const double lead = (alpha / 2.0) * std::pow(2.0, 2.0 / alpha) / a;
        upper = std::max(std::numbers::ln2, (alpha / 2.0) * std::log(lead / quad.abs_tol));
    } else {
        // only L_{I_A} decays; it falls off like exp(-k e^{2u/alpha})
        upper = 8.0;
        while (integrand(upper) > 1e-3 * quad.abs_tol) {
            upper *= 2.0;
            if (upper > 700.0) {
                throw std::domain_error("ergodic_rate_d2d: integrand does not decay");
            }
        }
    }
    const QuadResult outer = gauss_kronrod(integrand, 0.0, upper, quad);
    return {outer.value, outer.abs_error + upper * max_inner_error + quad.abs_tol};
}

}  // namespace d2dcov
