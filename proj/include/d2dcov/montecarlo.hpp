#pragma once

// Monte Carlo oracle: marked, thinned Poisson configurations on an annulus
// around the receiver, SIR trials, and coverage / rate estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "d2dcov/analytic.hpp"
#include "d2dcov/model.hpp"
#include "d2dcov/specfun.hpp"

namespace d2dcov {

enum class ThinningMode {
    /// Bernoulli retention with p(r_d); the process the Laplace functional describes.
    independent_retention,
    /// Keep points whose nearest neighbour lies within r_d.
    nearest_neighbor,
};

struct Interferer {
    double x = 0.0;
    double y = 0.0;
    std::size_t mark = 1;
    double fading = 1.0;
    bool retained = false;

    double radius() const { return std::hypot(x, y); }
};

struct CellUser {
    double radius = 0.0;
    double angle = 0.0;
    double fading = 1.0;
};

struct Realization {
    std::vector<Interferer> interferers;
    CellUser cell_user;
};

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t trials = 0;

    double ci_low() const { return mean - 1.96 * std_err; }
    double ci_high() const { return mean + 1.96 * std_err; }
};

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for trial `index` under one master seed; the same
/// (seed, index) always yields the same stream regardless of scheduling.
inline Engine trial_engine(std::uint64_t seed, std::uint64_t index)
{
    return Engine(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Outer radius of the simulated interferer annulus.
inline double simulation_radius(const ScenarioParams& p)
{
    return p.field_unbounded() ? p.cell_radius_m : p.field_radius_m;
}

namespace detail {

inline double uniform01(Engine& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double annulus_radius(double inner, double outer, double u)
{
    return std::sqrt(inner * inner + u * (outer * outer - inner * inner));
}

// Marks every point whose nearest neighbour is within `reach`, bucketing
// points on a square grid of side `reach`.
inline void retain_nearest_neighbors(std::vector<Interferer>& pts, double reach)
{
    for (auto& q : pts) {
        q.retained = false;
    }
    if (!(reach > 0.0) || pts.size() < 2) {
        return;
    }
    auto cell_of = [reach](double v) { return static_cast<std::int64_t>(std::floor(v / reach)); };
    auto key = [](std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        grid[key(cell_of(pts[i].x), cell_of(pts[i].y))].push_back(i);
    }
    const double reach2 = reach * reach;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::int64_t cx = cell_of(pts[i].x);
        const std::int64_t cy = cell_of(pts[i].y);
        for (std::int64_t dx = -1; dx <= 1 && !pts[i].retained; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && !pts[i].retained; ++dy) {
                const auto it = grid.find(key(cx + dx, cy + dy));
                if (it == grid.end()) {
                    continue;
                }
                for (std::size_t j : it->second) {
                    if (j == i) {
                        continue;
                    }
                    const double ddx = pts[i].x - pts[j].x;
                    const double ddy = pts[i].y - pts[j].y;
                    if (ddx * ddx + ddy * ddy <= reach2) {
                        pts[i].retained = true;
                        break;
                    }
                }
            }
        }
    }
}

}  // namespace detail

/// Draw the interferer field and the cellular user for one trial.
inline Realization sample_realization(const ScenarioParams& p, const ZipfLaw& zipf, ThinningMode mode, Engine& rng)
{
    Realization real;
    const double r0 = p.protection_radius_m;
    const double outer = simulation_radius(p);
    const double mean_count = p.density_per_m2 * std::numbers::pi * (outer * outer - r0 * r0);
    std::exponential_distribution<double> fading(p.fading_rate);

    std::size_t count = 0;
    if (mean_count > 0.0) {
        count = static_cast<std::size_t>(std::poisson_distribution<std::int64_t>(mean_count)(rng));
    }
    real.interferers.resize(count);
    const double keep = retention_prob(p.density_per_m2, p.pairing_distance_m);
    for (auto& q : real.interferers) {
        const double radius = detail::annulus_radius(r0, outer, detail::uniform01(rng));
        const double theta = 2.0 * std::numbers::pi * detail::uniform01(rng);
        q.x = radius * std::cos(theta);
        q.y = radius * std::sin(theta);
        q.mark = zipf.sample(detail::uniform01(rng));
        q.fading = fading(rng);
        const double u = detail::uniform01(rng);
        q.retained = mode == ThinningMode::independent_retention && u < keep;
    }
    if (mode == ThinningMode::nearest_neighbor) {
        detail::retain_nearest_neighbors(real.interferers, p.pairing_distance_m);
    }

    real.cell_user.radius = detail::annulus_radius(r0, p.cell_radius_m, detail::uniform01(rng));
    real.cell_user.angle = 2.0 * std::numbers::pi * detail::uniform01(rng);
    real.cell_user.fading = fading(rng);
    return real;
}

inline Realization sample_realization(const ScenarioParams& p, ThinningMode mode, Engine& rng)
{
    return sample_realization(p, p.zipf(), mode, rng);
}

/// Interference at the origin from retained points, each weighted by 1/mark.
inline double mark_weighted_interference(const std::vector<Interferer>& pts, const ScenarioParams& p)
{
    double sum = 0.0;
    for (const auto& q : pts) {
        if (q.retained) {
            const double r = q.radius();
            sum += p.p_d2d_interferer_w * q.fading * std::pow(r, -p.path_loss_exp) / static_cast<double>(q.mark);
        }
    }
    return sum;
}

struct SirOutcome {
    double sir = 0.0;
    bool covered = false;
};

/// Uplink SIR at the base station; a trial without interference is covered.
inline SirOutcome sir_trial(const Realization& real, const ScenarioParams& p)
{
    const CellUser& cu = real.cell_user;
    const double signal =
        p.p_cellular_w * cu.fading * std::pow(cu.radius, p.path_loss_exp * (p.power_control - 1.0));
    const double interference = mark_weighted_interference(real.interferers, p);
    if (interference == 0.0) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    const double sir = signal / interference;
    return {sir, sir >= p.sir_threshold_lin};
}

struct McOptions {
    /// 0 picks hardware concurrency.
    unsigned threads = 0;
};

namespace detail {

inline unsigned worker_count(const McOptions& opts, std::size_t trials)
{
    unsigned n = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(trials, 1)));
}

inline constexpr std::size_t reduction_block = 1024;

// Runs body(trial_index) -> double over all trials. Partial sums are formed
// per fixed block of trials and reduced in block order, so the result does
// not depend on the worker count.
template <class Body>
std::pair<double, double> blocked_sum(std::size_t trials, const McOptions& opts, Body body)
{
    const std::size_t blocks = (trials + reduction_block - 1) / reduction_block;
    std::vector<double> sums(blocks, 0.0);
    std::vector<double> squares(blocks, 0.0);
    auto work = [&](std::size_t first_block, std::size_t stride) {
        for (std::size_t b = first_block; b < blocks; b += stride) {
            const std::size_t end = std::min(trials, (b + 1) * reduction_block);
            double s = 0.0;
            double s2 = 0.0;
            for (std::size_t t = b * reduction_block; t < end; ++t) {
                const double v = body(t);
                s += v;
                s2 += v * v;
            }
            sums[b] = s;
            squares[b] = s2;
        }
    };
    const unsigned workers = worker_count(opts, blocks);
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w, workers);
        }
    }
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        s += sums[b];
        s2 += squares[b];
    }
    return {s, s2};
}

inline McEstimate estimate_from_sums(double sum, double sum_sq, std::size_t trials)
{
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var / n), trials};
}

inline McEstimate coverage_estimator(const ScenarioParams& p, ThinningMode mode, std::optional<double> fixed_radius,
                                     std::size_t trials, std::uint64_t seed, const McOptions& opts)
{
    if (trials < 1) {
        throw std::invalid_argument("coverage estimate needs at least one trial");
    }
    const ZipfLaw zipf = p.zipf();
    const auto [sum, sum_sq] = blocked_sum(trials, opts, [&](std::size_t t) {
        Engine rng = trial_engine(seed, t);
        Realization real = sample_realization(p, zipf, mode, rng);
        if (fixed_radius) {
            real.cell_user.radius = *fixed_radius;
        }
        return sir_trial(real, p).covered ? 1.0 : 0.0;
    });
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    return {mean, std::sqrt(mean * (1.0 - mean) / n), trials};
}

}  // namespace detail

/// Fraction of covered trials; std_err = sqrt(p(1-p)/trials).
inline McEstimate estimate_coverage(const ScenarioParams& p, ThinningMode mode, std::size_t trials,
                                    std::uint64_t seed, const McOptions& opts = {})
{
    if (trials < 100) {
        throw std::invalid_argument("estimate_coverage: at least 100 trials required");
    }
    return detail::coverage_estimator(p, mode, std::nullopt, trials, seed, opts);
}

/// Coverage with the cellular user pinned at distance r_c.
inline McEstimate estimate_conditional_coverage(const ScenarioParams& p, ThinningMode mode, double r_c,
                                                std::size_t trials, std::uint64_t seed, const McOptions& opts = {})
{
    if (trials < 100) {
        throw std::invalid_argument("estimate_conditional_coverage: at least 100 trials required");
    }
    return detail::coverage_estimator(p, mode, r_c, trials, seed, opts);
}

/// Uniform point in a disc of radius R.
inline std::pair<double, double> uniform_in_disc(double radius, Engine& rng)
{
    const double r = radius * std::sqrt(detail::uniform01(rng));
    const double t = 2.0 * std::numbers::pi * detail::uniform01(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

/// Mean of log2(1 + SIR) at a D2D receiver.
///
/// The receiver sits at the origin of the interferer annulus; its
/// transmitter is r_d away. The cellular user and the receiver are drawn
/// independently and uniformly in the cell, which is the geometry behind
/// the 128R/(45 pi) mean distance, so this oracle is looser than the
/// coverage one.
inline McEstimate estimate_rate_d2d(const ScenarioParams& p, ThinningMode mode, std::size_t trials,
                                    std::uint64_t seed, const McOptions& opts = {})
{
    if (trials < 100) {
        throw std::invalid_argument("estimate_rate_d2d: at least 100 trials required");
    }
    if (!(p.pairing_distance_m > 0.0)) {
        throw std::domain_error("estimate_rate_d2d: pairing distance must be positive");
    }
    const double thinned = p.density_per_m2 * retention_prob(p.density_per_m2, p.pairing_distance_m);
    if (!(p.p_cellular_w > 0.0) && (thinned == 0.0 || p.p_d2d_interferer_w == 0.0)) {
        throw std::domain_error("estimate_rate_d2d: rate unbounded in interference-free model");
    }
    const ZipfLaw zipf = p.zipf();
    const auto [sum, sum_sq] = detail::blocked_sum(trials, opts, [&](std::size_t t) {
        Engine rng = trial_engine(seed, t);
        const Realization real = sample_realization(p, zipf, mode, rng);
        std::exponential_distribution<double> fading(p.fading_rate);
        const double link_fading = fading(rng);
        const auto [ux, uy] = uniform_in_disc(p.cell_radius_m, rng);
        const auto [vx, vy] = uniform_in_disc(p.cell_radius_m, rng);
        const double d = std::max(std::hypot(ux - vx, uy - vy), p.protection_radius_m);
        const double cellular = p.p_cellular_w * real.cell_user.fading * std::pow(d, -p.path_loss_exp);
        const double signal = p.p_d2d_tx_w * link_fading * std::pow(p.pairing_distance_m, -p.path_loss_exp);
        const double sir = signal / (cellular + mark_weighted_interference(real.interferers, p));
        return std::log2(1.0 + sir);
    });
    return detail::estimate_from_sums(sum, sum_sq, trials);
}

/// Debug dump: header `x_m,y_m,mark,fading,retained`, one line per point.
inline void write_realization_csv(const Realization& real, std::ostream& out)
{
    out << "x_m,y_m,mark,fading,retained\n";
    const auto old = out.precision(10);
    for (const auto& q : real.interferers) {
        out << q.x << ',' << q.y << ',' << q.mark << ',' << q.fading << ',' << (q.retained ? 1 : 0) << '\n';
    }
    out.precision(old);
}

}  // namespace d2dcov
