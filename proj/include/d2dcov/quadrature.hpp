#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) on finite intervals and cached
// Gauss-Legendre rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2dcov {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;

    void check() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
        }
    }
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;

    QuadResult& operator+=(const QuadResult& o)
    {
        value += o.value;
        abs_error += o.abs_error;
        subdivisions += o.subdivisions;
        return *this;
    }
};

/// Adaptive integration did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error)
    {
    }

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

namespace detail {

// QUADPACK qk21 abscissae and weights.
inline constexpr std::array<double, 11> kronrod21_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 11> kronrod21_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525250773, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
};
// Weights of the embedded 10-point Gauss rule at kronrod21_nodes[1, 3, 5, 7, 9].
inline constexpr std::array<double, 5> gauss10_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod21(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod21_weights[10];
    double gauss = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kronrod21_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod21_weights[j] * pair;
        if (j % 2 == 1) {
            gauss += gauss10_weights[j / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integrate f over [a, b] by bisecting the segment with the largest
/// |K21 - G10| until the summed estimate meets max(abs_tol, rel_tol |I|).
/// Throws QuadratureError when max_subdivisions is exhausted.
template <class F>
QuadResult gauss_kronrod(F&& f, double a, double b, const QuadratureSpec& spec)
{
    spec.check();
    if (a == b) {
        return {};
    }
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::kronrod21(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    int subdivisions = 1;

    auto converged = [&] { return error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (subdivisions >= spec.max_subdivisions) {
            throw QuadratureError("gauss_kronrod: subdivision limit reached", error);
        }
        const detail::Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("gauss_kronrod: segment below floating-point resolution", error);
        }
        heap.pop();
        const detail::Segment left = detail::kronrod21(f, worst.a, mid);
        const detail::Segment right = detail::kronrod21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
        if (heap.size() % 64 == 0) {
            // resum to shed accumulated cancellation in the running totals
            auto copy = heap;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, error, subdivisions};
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendreRule make_gauss_legendre(std::size_t n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Thread-safe cache of Gauss-Legendre rules by order.
inline const GaussLegendreRule& gauss_legendre(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, make_gauss_legendre(n)).first;
    }
    return it->second;
}

}  // namespace d2dcov
