#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "d2dcov/specfun.hpp"

namespace d2dcov {

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }
inline double dbm_to_watts(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Physical and model parameters of one scenario, in SI / linear units.
///
/// Defaults are the small-cell baseline: R = 500 m, R0 = 1 m, p_i = 1 mW,
/// p_c = 0.2 W, r_d = 10 m, tau = 15 dB, alpha = 4, N = 10 files.
struct ScenarioParams {
    double cell_radius_m = 500.0;
    double protection_radius_m = 1.0;
    double density_per_m2 = 1e-4;
    double pairing_distance_m = 10.0;
    double sir_threshold_lin = db_to_linear(15.0);
    double p_cellular_w = 0.2;
    double p_d2d_interferer_w = 1e-3;
    double p_d2d_tx_w = 1e-3;
    double path_loss_exp = 4.0;
    double power_control = 0.0;
    /// Rate of the exponential power fading; unit mean when 1.
    double fading_rate = 1.0;
    std::size_t n_files = 10;
    double zipf_shape = 1.0;
    /// Outer radius of the D2D interferer field. Infinity integrates the
    /// interference over the whole plane outside R0.
    double field_radius_m = std::numeric_limits<double>::infinity();

    ZipfLaw zipf() const { return ZipfLaw(n_files, zipf_shape); }
    bool field_unbounded() const { return std::isinf(field_radius_m); }
};

/// Which g(x, r_c) variant an analytic evaluation uses.
struct BoundKind {
    enum class Variant { general, upper, lower };

    Variant variant = Variant::upper;
    double shape = 1.0;

    static BoundKind general(double s) { return {Variant::general, s}; }
    /// Closed form at s = 1 (digamma); upper bound on coverage.
    static BoundKind upper() { return {Variant::upper, 1.0}; }
    /// Closed form at s = 10 (polygamma); lower bound on coverage.
    static BoundKind lower() { return {Variant::lower, 10.0}; }

    std::string name() const
    {
        switch (variant) {
        case Variant::upper:
            return "ub";
        case Variant::lower:
            return "lb";
        case Variant::general:
            break;
        }
        return "general";
    }

    friend bool operator==(const BoundKind&, const BoundKind&) = default;
};

struct Violation {
    std::string field;
    std::string message;
};

/// Every violated ScenarioParams invariant; empty when the scenario is valid.
inline std::vector<Violation> validate(const ScenarioParams& p)
{
    std::vector<Violation> out;
    auto fail = [&out](std::string field, std::string message) {
        out.push_back({std::move(field), std::move(message)});
    };

    if (!(p.cell_radius_m > 0.0) || !std::isfinite(p.cell_radius_m)) {
        fail("cell_radius_m", "cell_radius_m must be a finite positive length");
    }
    if (!(p.protection_radius_m > 0.0)) {
        fail("protection_radius_m", "protection_radius_m must be positive");
    } else if (p.protection_radius_m > p.cell_radius_m / 100.0) {
        fail("protection_radius_m", "protection_radius_m must not exceed cell_radius_m / 100");
    }
    if (!(p.density_per_m2 >= 0.0) || !std::isfinite(p.density_per_m2)) {
        fail("density_per_m2", "density_per_m2 must be finite and non-negative");
    }
    if (!(p.pairing_distance_m >= 0.0) || !std::isfinite(p.pairing_distance_m)) {
        fail("pairing_distance_m", "pairing_distance_m must be finite and non-negative");
    }
    if (!(p.sir_threshold_lin > 0.0)) {
        fail("sir_threshold_lin", "sir_threshold_lin must be positive");
    }
    if (!(p.p_cellular_w > 0.0)) {
        fail("p_cellular_w", "p_cellular_w must be positive");
    }
    if (!(p.p_d2d_interferer_w > 0.0)) {
        fail("p_d2d_interferer_w", "p_d2d_interferer_w must be positive");
    }
    if (!(p.p_d2d_tx_w > 0.0)) {
        fail("p_d2d_tx_w", "p_d2d_tx_w must be positive");
    }
    if (p.field_unbounded()) {
        if (!(p.path_loss_exp > 2.0)) {
            fail("path_loss_exp", "path_loss_exp must exceed 2");
        }
    } else {
        if (!(p.path_loss_exp > 0.0)) {
            fail("path_loss_exp", "path_loss_exp must be positive");
        }
        if (!(p.field_radius_m > p.protection_radius_m)) {
            fail("field_radius_m", "field_radius_m must exceed protection_radius_m");
        }
    }
    if (!(p.power_control >= 0.0 && p.power_control <= 1.0)) {
        fail("power_control", "power_control outside [0,1]");
    }
    if (!(p.fading_rate > 0.0)) {
        fail("fading_rate", "fading_rate must be positive");
    }
    if (p.n_files < 1) {
        fail("n_files", "n_files must be >= 1");
    }
    if (!(p.zipf_shape > 0.0)) {
        fail("zipf_shape", "zipf_shape must be positive");
    }
    return out;
}

/// Mean number of D2D users on the annulus [R0, R].
inline double expected_user_count(const ScenarioParams& p)
{
    const double r = p.cell_radius_m;
    const double r0 = p.protection_radius_m;
    return p.density_per_m2 * std::numbers::pi * (r * r - r0 * r0);
}

/// Density that puts `users` D2D users on average in a disc of radius R.
inline double density_for_users(double users, double cell_radius_m)
{
    return users / (std::numbers::pi * cell_radius_m * cell_radius_m);
}

}  // namespace d2dcov
