#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "d2dcov/analytic.hpp"
#include "oracles.hpp"

using namespace d2dcov;

namespace {

ScenarioParams baseline() { return ScenarioParams{}; }

// Kernel whose normalised level at x = 1 is exactly c (alpha = 4, mu = 1).
InterferenceKernel kernel_with_level(double c, BoundKind bound, const ScenarioParams& p)
{
    return make_kernel(1.0, p.p_d2d_interferer_w / p.fading_rate, c, bound, p);
}

double load_of(const InterferenceKernel& k, const ScenarioParams& p)
{
    return k.laplace_arg * p.p_d2d_interferer_w / p.fading_rate;
}

// Coverage by Simpson over r_c with the arctan inner integral (alpha = 4).
double coverage_oracle(const ScenarioParams& p, double shape)
{
    const long double lam = p.density_per_m2;
    const long double keep = -std::expm1(-std::numbers::pi * p.density_per_m2 * p.pairing_distance_m * p.pairing_distance_m);
    const long double r = p.cell_radius_m;
    const long double r0 = p.protection_radius_m;
    const long double outer = p.field_unbounded() ? -1.0L : p.field_radius_m;
    auto f = [&](long double rc) {
        const long double s = p.sir_threshold_lin / p.p_cellular_w *
                              std::pow(rc, static_cast<long double>(p.path_loss_exp * (1.0 - p.power_control)));
        const long double load = s * p.p_d2d_interferer_w / p.fading_rate;
        const long double inner = oracle::inner_alpha4(r0, load, p.n_files, shape, outer);
        return std::exp(-2.0L * oracle::pi * lam * keep * inner) * 2.0L * rc / (r * r);
    };
    return static_cast<double>(oracle::simpson(f, r0, r, 4000));
}

}  // namespace

TEST(Retention, Values)
{
    EXPECT_EQ(retention_prob(1e-3, 0.0), 0.0);
    EXPECT_EQ(retention_prob(0.0, 10.0), 0.0);
    const long double ref = 1.0L - std::exp(-oracle::pi * 1e-4L * 100.0L);
    EXPECT_NEAR(retention_prob(1e-4, 10.0), static_cast<double>(ref), 1e-15);
    EXPECT_NEAR(retention_prob(1e-4, 10.0), 0.0309275737, 1e-10);
    EXPECT_NEAR(1.0 - retention_prob(0.1, 10.0), std::exp(-10.0 * std::numbers::pi), 1e-16);
    EXPECT_LT(retention_prob(0.1, 10.0), 1.0);
    double prev = 0.0;
    for (double rd = 1.0; rd <= 50.0; rd += 1.0) {
        const double v = retention_prob(1e-4, rd);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Kernel, ConstantConsistency)
{
    const ScenarioParams p = baseline();
    const auto k = cellular_kernel(p, 250.0, BoundKind::upper());
    EXPECT_NEAR(k.a_const * p.fading_rate / p.p_d2d_interferer_w, p.sir_threshold_lin / p.p_cellular_w, 1e-12);
    EXPECT_NEAR(k.laplace_arg, p.sir_threshold_lin / p.p_cellular_w * std::pow(250.0, 4.0), 1e-3);
    EXPECT_THROW(make_kernel(1.0, 0.0, 1.0, BoundKind::upper(), p), std::invalid_argument);
}

TEST(GGeneral, NoInterferencePower)
{
    ScenarioParams p = baseline();
    p.p_d2d_interferer_w = 0.0;
    const auto k = cellular_kernel(p, 300.0, BoundKind::general(2.0));
    EXPECT_EQ(g_general(5.0, k, p), 1.0);
}

TEST(GGeneral, FarField)
{
    const ScenarioParams p = baseline();
    const auto k = cellular_kernel(p, 500.0, BoundKind::general(1.0));
    EXPECT_NEAR(g_general(1e9, k, p), 1.0, 1e-12);
}

TEST(GGeneral, MatchesSumOracle)
{
    const ScenarioParams p = baseline();
    for (double s : {0.5, 1.0, 3.0, 10.0}) {
        const auto k = cellular_kernel(p, 123.0, BoundKind::general(s));
        for (double x : {1.0, 10.0, 57.0, 300.0, 2e3}) {
            const double ref = static_cast<double>(oracle::g_sum(x, 4.0L, load_of(k, p), p.n_files, s));
            EXPECT_NEAR(g_general(x, k, p), ref, 1e-13) << s << ' ' << x;
        }
    }
}

TEST(GUb, EqualsGeneralShapeOne)
{
    const ScenarioParams p = baseline();
    const auto ku = cellular_kernel(p, 250.0, BoundKind::upper());
    const auto kg = cellular_kernel(p, 250.0, BoundKind::general(1.0));
    EXPECT_NEAR(g_ub(100.0, ku, p) / g_general(100.0, kg, p), 1.0, 1e-10);
}

TEST(GUb, KnownLevels)
{
    const ScenarioParams p = baseline();
    EXPECT_NEAR(g_ub(1.0, kernel_with_level(0.0, BoundKind::upper(), p), p), 1.0, 1e-14);
    long double ref = 0.0L;
    for (int m = 1; m <= 10; ++m) {
        ref += 1.0L / (m + 1);
    }
    ref /= oracle::harmonic(10, 1.0L);
    const double v = g_ub(1.0, kernel_with_level(1.0, BoundKind::upper(), p), p);
    EXPECT_NEAR(v, static_cast<double>(ref), 1e-12);
    EXPECT_NEAR(v, 0.6896207708, 1e-9);
}

TEST(GLb, KnownLevels)
{
    const ScenarioParams p = baseline();
    EXPECT_NEAR(g_lb(1.0, kernel_with_level(0.0, BoundKind::lower(), p), p), 1.0, 1e-12);
    EXPECT_NEAR(g_lb(1.0, kernel_with_level(1.0, BoundKind::lower(), p), p), 0.5, 1e-10);
}

TEST(GLb, BracketIdentity)
{
    for (std::size_t n : {1u, 5u, 10u, 100u}) {
        const double ref = static_cast<double>(oracle::harmonic(n, 10.0L));
        EXPECT_NEAR(lower_bound_bracket(n) / ref, 1.0, 1e-12) << n;
    }
}

TEST(GLb, CloseToGeneralShapeTen)
{
    const ScenarioParams p = baseline();
    for (double lc = -3.0; lc <= 3.0; lc += 0.25) {
        const double c = std::pow(10.0, lc);
        const double lb = g_lb(1.0, kernel_with_level(c, BoundKind::lower(), p), p);
        const double ref = static_cast<double>(oracle::g_sum(1.0L, 4.0L, c, 10, 10.0L));
        EXPECT_LE(std::abs(lb - ref) / ref, 2e-3) << c;
    }
}

TEST(Complement, MatchesDirectSumEverywhere)
{
    const ScenarioParams p = baseline();
    for (BoundKind b : {BoundKind::upper(), BoundKind::lower(), BoundKind::general(2.5)}) {
        const auto k = cellular_kernel(p, 400.0, b);
        const InterferenceComplement comp(k, p);
        const long double load = load_of(k, p);
        for (double x : {1.0, 10.0, 100.0, 1e3, 1e4, 1e6, 1e9}) {
            // 1 - g = sum_m z_m b_m / (x^alpha + b_m); LB keeps only b_1
            const std::size_t n = b.variant == BoundKind::Variant::lower ? 1 : p.n_files;
            const long double h = oracle::harmonic(p.n_files, b.shape);
            long double ref = 0.0L;
            for (std::size_t m = 1; m <= n; ++m) {
                const long double z = b.variant == BoundKind::Variant::lower ? 1.0L : std::pow((long double)m, -(long double)b.shape) / h;
                const long double bm = load / m;
                ref += z * bm / (std::pow((long double)x, 4.0L) + bm);
            }
            EXPECT_NEAR(comp(x) / static_cast<double>(ref), 1.0, 1e-9) << b.name() << " x=" << x;
        }
    }
}

TEST(InnerIntegral, Alpha4ClosedForm)
{
    ScenarioParams p = baseline();
    for (bool bounded : {false, true}) {
        p.field_radius_m = bounded ? 500.0 : std::numeric_limits<double>::infinity();
        for (BoundKind b : {BoundKind::upper(), BoundKind::lower(), BoundKind::general(4.0)}) {
            for (double rc : {1.0, 20.0, 250.0, 500.0}) {
                const auto k = cellular_kernel(p, rc, b);
                const double load = load_of(k, p);
                const long double outer = bounded ? 500.0L : -1.0L;
                const double ref = b.variant == BoundKind::Variant::lower
                                       ? static_cast<double>(oracle::inner_alpha4(1.0L, load, 1, 1.0L, outer))
                                       : static_cast<double>(oracle::inner_alpha4(1.0L, load, p.n_files, b.shape, outer));
                const QuadResult q = interference_integral(k, p, {});
                EXPECT_NEAR(q.value / ref, 1.0, 1e-8) << b.name() << " rc=" << rc << " bounded=" << bounded;
                EXPECT_NEAR(interference_integral_alpha4(k, p) / ref, 1.0, 1e-12);
            }
        }
    }
}

TEST(InnerIntegral, OtherExponents)
{
    ScenarioParams p = baseline();
    for (double alpha : {2.5, 3.0, 3.7, 5.0}) {
        p.path_loss_exp = alpha;
        const auto k = cellular_kernel(p, 150.0, BoundKind::general(1.0));
        const double ref = static_cast<double>(
            oracle::inner_simpson(1.0L, std::numeric_limits<long double>::infinity(), alpha, load_of(k, p), 10, 1.0L));
        EXPECT_NEAR(interference_integral(k, p, {}).value / ref, 1.0, 1e-6) << alpha;
    }
    p.field_radius_m = 500.0;
    for (double alpha : {1.8, 2.0, 4.0}) {
        p.path_loss_exp = alpha;
        const auto k = cellular_kernel(p, 150.0, BoundKind::upper());
        const double ref = static_cast<double>(oracle::inner_simpson(1.0L, 500.0L, alpha, load_of(k, p), 10, 1.0L));
        EXPECT_NEAR(interference_integral(k, p, {}).value / ref, 1.0, 1e-8) << alpha;
    }
}

TEST(InnerIntegral, DivergentExponentRejected)
{
    ScenarioParams p = baseline();
    p.path_loss_exp = 2.0;
    const auto k = cellular_kernel(p, 150.0, BoundKind::upper());
    EXPECT_THROW(interference_integral(k, p, {}), std::domain_error);
}

TEST(InnerIntegral, FailureCarriesErrorEstimate)
{
    const ScenarioParams p = baseline();
    const auto k = cellular_kernel(p, 150.0, BoundKind::general(1.0));
    const QuadratureSpec tight{1e-15, 1e-300, 2};
    try {
        interference_integral(k, p, tight);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_GE(e.achieved_error(), 0.0);
    }
}

TEST(Laplace, TrivialCases)
{
    ScenarioParams p = baseline();
    p.density_per_m2 = 0.0;
    EXPECT_EQ(laplace_ia(cellular_kernel(p, 100.0, BoundKind::upper()), p), 1.0);
    p = baseline();
    p.pairing_distance_m = 0.0;
    EXPECT_EQ(laplace_ia(cellular_kernel(p, 100.0, BoundKind::upper()), p), 1.0);
    p = baseline();
    p.p_d2d_interferer_w = 0.0;
    EXPECT_EQ(laplace_ia(cellular_kernel(p, 100.0, BoundKind::lower()), p), 1.0);
}

TEST(Laplace, InUnitInterval)
{
    const ScenarioParams p = baseline();
    for (double rc : {1.0, 50.0, 500.0}) {
        const double v = laplace_ia(cellular_kernel(p, rc, BoundKind::general(3.0)), p);
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Coverage, NoInterferers)
{
    ScenarioParams p = baseline();
    p.density_per_m2 = 0.0;
    const auto c = coverage_cellular(p, BoundKind::upper());
    // the 2 r_c / R^2 weight is not renormalised for the R0 hole
    EXPECT_NEAR(c.probability, 1.0 - 1.0 / (500.0 * 500.0), 1e-13);
    EXPECT_NEAR(c.probability, 1.0, 5e-6);
}

TEST(Coverage, MatchesSimpsonOracle)
{
    ScenarioParams p = baseline();
    for (double lam : {0.03e-3, 0.1e-3, 0.3e-3}) {
        for (double eps : {0.0, 0.25, 1.0}) {
            p.density_per_m2 = lam;
            p.power_control = eps;
            for (auto [b, shape] : {std::pair{BoundKind::upper(), 1.0}, std::pair{BoundKind::general(3.0), 3.0}}) {
                const double ref = coverage_oracle(p, shape);
                const auto c = coverage_cellular(p, b);
                EXPECT_NEAR(c.probability, ref, 1e-7) << lam << ' ' << eps << ' ' << b.name();
            }
        }
    }
}

TEST(Coverage, BoundOrdering)
{
    ScenarioParams p = baseline();
    for (double eps : {0.0, 0.25}) {
        for (double lam : {0.03e-3, 0.3e-3}) {
            p.density_per_m2 = lam;
            p.power_control = eps;
            const double ub = coverage_cellular(p, BoundKind::upper()).probability;
            const double lb = coverage_cellular(p, BoundKind::lower()).probability;
            double prev = 2.0;
            for (double s : {1.0, 1.5, 2.0, 4.0, 7.0, 10.0}) {
                const double g = coverage_cellular(p, BoundKind::general(s)).probability;
                EXPECT_LE(g, ub + 1e-12);
                EXPECT_GE(g, lb - 1e-12);
                EXPECT_LE(g, prev + 1e-12) << s;
                prev = g;
            }
        }
    }
}

TEST(Coverage, ContinuityAtTheBounds)
{
    const ScenarioParams p = baseline();
    EXPECT_NEAR(coverage_cellular(p, BoundKind::general(1.0)).probability,
                coverage_cellular(p, BoundKind::upper()).probability, 1e-9);
    EXPECT_LE(std::abs(coverage_cellular(p, BoundKind::general(10.0)).probability -
                       coverage_cellular(p, BoundKind::lower()).probability),
              1e-2);
}

TEST(Coverage, Monotonicity)
{
    const ScenarioParams base = baseline();
    auto cov = [](const ScenarioParams& p) { return coverage_cellular(p, BoundKind::upper()).probability; };
    auto sweep = [&](auto set, std::initializer_list<double> grid, bool increasing) {
        double prev = increasing ? -1.0 : 2.0;
        for (double v : grid) {
            ScenarioParams p = base;
            set(p, v);
            const double c = cov(p);
            if (increasing) {
                EXPECT_GE(c, prev - 1e-12) << v;
            } else {
                EXPECT_LE(c, prev + 1e-12) << v;
            }
            prev = c;
        }
    };
    sweep([](ScenarioParams& p, double v) { p.density_per_m2 = v; }, {1e-5, 3e-5, 1e-4, 3e-4, 1e-3}, false);
    sweep([](ScenarioParams& p, double v) { p.sir_threshold_lin = db_to_linear(v); }, {-5.0, 5.0, 15.0, 25.0}, false);
    sweep([](ScenarioParams& p, double v) { p.p_d2d_interferer_w = v; }, {1e-5, 1e-4, 1e-3, 1e-2}, false);
    sweep([](ScenarioParams& p, double v) { p.pairing_distance_m = v; }, {1.0, 5.0, 10.0, 30.0, 100.0}, false);
    sweep([](ScenarioParams& p, double v) { p.power_control = v; }, {0.0, 0.25, 0.5, 0.75, 1.0}, true);
    sweep([](ScenarioParams& p, double v) { p.p_cellular_w = v; }, {0.01, 0.05, 0.2, 1.0}, true);
}

TEST(Coverage, ToleranceHalving)
{
    ScenarioParams p = baseline();
    for (double lam : {0.03e-3, 0.3e-3}) {
        p.density_per_m2 = lam;
        for (BoundKind b : {BoundKind::upper(), BoundKind::lower()}) {
            const QuadratureSpec coarse{1e-6, 1e-12, 2000};
            const QuadratureSpec fine{5e-7, 1e-12, 2000};
            const auto a = coverage_cellular(p, b, coarse);
            const auto c = coverage_cellular(p, b, fine);
            EXPECT_LE(std::abs(a.probability - c.probability), a.error_estimate) << lam << ' ' << b.name();
        }
    }
}

TEST(Noise, Negligible)
{
    EXPECT_EQ(noise_negligibility(0.0, 1.0, 0.1, 10.0, 4.0), 1.0);
    EXPECT_GE(noise_negligibility(1.8e-14, std::pow(10.0, -0.5), 0.1, 10.0, 4.0), 0.999);
    EXPECT_GE(noise_negligibility(1.8e-15, std::pow(10.0, -0.5), 0.1, 10.0, 4.0), 0.999);
}

TEST(CellularFactor, Formula)
{
    ScenarioParams p = baseline();
    EXPECT_EQ(laplace_ic_approx(0.0, p), 1.0);
    p.p_cellular_w = p.p_d2d_tx_w;
    const double d = 128.0 * 500.0 / (45.0 * std::numbers::pi);
    EXPECT_NEAR(laplace_ic_approx(1.0, p), 1.0 / (1.0 + 100.0 / (d * d)), 1e-15);
    EXPECT_NEAR(laplace_ic_approx(1.0, p), 0.9995122998, 1e-9);
    p.pairing_distance_m = 0.0;
    EXPECT_EQ(laplace_ic_approx(3.0, p), 1.0);
    p = baseline();
    double prev = 1.0;
    for (double g : {0.1, 1.0, 10.0, 100.0}) {
        EXPECT_LT(laplace_ic_approx(g, p), prev);
        prev = laplace_ic_approx(g, p);
    }
}

namespace {

// Trapezoid over v = ln gamma on [-30, 60]; below e^-30 the integrand is 1.
double rate_oracle_nats(const ScenarioParams& p, double shape)
{
    const long double keep = -std::expm1(-std::numbers::pi * p.density_per_m2 * p.pairing_distance_m * p.pairing_distance_m);
    const long double d = 128.0L * p.cell_radius_m / (45.0L * oracle::pi);
    const std::size_t n = 60000;
    const long double lo = -30.0L;
    const long double hi = 60.0L;
    long double sum = 0.0L;
    for (std::size_t i = 0; i <= n; ++i) {
        const long double gamma = std::exp(lo + (hi - lo) * i / n);
        const long double s = gamma / p.p_d2d_tx_w * std::pow((long double)p.pairing_distance_m, 4.0L);
        const long double inner = oracle::inner_alpha4(p.protection_radius_m, s * p.p_d2d_interferer_w, p.n_files, shape);
        const long double lc = 1.0L / (1.0L + std::sqrt(gamma * p.p_cellular_w / p.p_d2d_tx_w) *
                                                  p.pairing_distance_m * p.pairing_distance_m / (d * d));
        const long double f = lc * std::exp(-2.0L * oracle::pi * p.density_per_m2 * keep * inner) * gamma / (1.0L + gamma);
        sum += (i == 0 || i == n) ? f / 2.0L : f;
    }
    return static_cast<double>(sum * (hi - lo) / n + std::exp(lo));
}

ScenarioParams rate_params()
{
    ScenarioParams p;
    p.density_per_m2 = density_for_users(1000.0, p.cell_radius_m);
    return p;
}

}  // namespace

TEST(Rate, MatchesTrapezoidOracle)
{
    ScenarioParams p = rate_params();
    for (double pc : {1e-3, 0.2, 1.0}) {
        p.p_cellular_w = pc;
        const double ref = rate_oracle_nats(p, 1.0);
        const auto r = ergodic_rate_d2d(p, BoundKind::upper());
        EXPECT_NEAR(r.nats / ref, 1.0, 1e-5) << pc;
        EXPECT_NEAR(r.bits_per_hz(), r.nats / std::log(2.0), 1e-12);
    }
}

TEST(Rate, DecreasesWithDensity)
{
    ScenarioParams p = rate_params();
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3}) {
        p.density_per_m2 = lam;
        const double r = ergodic_rate_d2d(p, BoundKind::lower()).nats;
        EXPECT_LT(r, prev) << lam;
        prev = r;
    }
}

TEST(Rate, BlockageAtLongPairingDistance)
{
    ScenarioParams p = rate_params();
    const double near = ergodic_rate_d2d(p, BoundKind::upper()).nats;
    p.pairing_distance_m = 100.0;
    const double far = ergodic_rate_d2d(p, BoundKind::upper()).nats;
    EXPECT_LT(far, 0.1 * near);
    EXPECT_NEAR(far / rate_oracle_nats(p, 1.0), 1.0, 1e-3);
}

TEST(Rate, DivergenceGuard)
{
    ScenarioParams p = rate_params();
    p.density_per_m2 = 0.0;
    p.p_cellular_w = 0.0;
    try {
        ergodic_rate_d2d(p, BoundKind::upper());
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("rate unbounded in interference-free model"), std::string::npos);
    }
    p = rate_params();
    p.pairing_distance_m = 0.0;
    EXPECT_THROW(ergodic_rate_d2d(p, BoundKind::upper()), std::domain_error);
    // no cellular interference but a D2D field: still finite
    p = rate_params();
    p.p_cellular_w = 0.0;
    const double r = ergodic_rate_d2d(p, BoundKind::upper()).nats;
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GT(r, ergodic_rate_d2d(rate_params(), BoundKind::upper()).nats);
}
