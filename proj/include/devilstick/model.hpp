#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "devilstick/error.hpp"

namespace devilstick {

using Vec2 = Eigen::Vector2d;

/// Physical constants of the stick. Use make_params() to get J = m*ell^2/12.
struct StickParams {
    double m = 0.1;      // kg
    double ell = 0.5;    // m
    double J = 0.1 * 0.5 * 0.5 / 12.0;  // kg m^2, about the center of mass
    double g = 9.81;     // m/s^2
};

inline StickParams make_params(double m, double ell, double g = 9.81) {
    return StickParams{m, ell, m * ell * ell / 12.0, g};
}

/// Planar state of the stick: center-of-mass position and velocity,
/// orientation from the horizontal (CCW positive) and angular rate.
struct FullState {
    Vec2 h = Vec2::Zero();
    Vec2 v = Vec2::Zero();
    double theta = 0.0;
    double omega = 0.0;

    bool finite() const {
        return h.allFinite() && v.allFinite() && std::isfinite(theta) && std::isfinite(omega);
    }
};

/// Orientations at which impulses are applied and the constraint/convergence
/// parameters.  theta_odd is used at odd k, theta_even at even k.
struct JuggleSpec {
    double theta_odd = std::numbers::pi / 6.0;
    double theta_even = 5.0 * std::numbers::pi / 6.0;
    double alpha = 0.6131;
    double beta = 3.0;
    double lambda_x = 0.5;
    double lambda_y = 0.5;

    double delta_theta_star() const { return theta_even - theta_odd; }

    bool symmetric() const {
        return std::abs(theta_even - (std::numbers::pi - theta_odd)) <= 1e-12;
    }
};

/// One impulsive actuation.
struct ImpulseCmd {
    double I = 0.0;      // N s
    double r = 0.0;      // m, signed offset along the stick
    double delta = 0.0;  // s, flight time to the next impulse
};

/// Impulse index k >= 1.  k = 1 is odd and happens at theta_odd.
class KParity {
public:
    constexpr explicit KParity(long k = 1) : k_(k) {
        if (k < 1) throw Error(ErrorKind::InvalidArgument, "impulse index must be >= 1");
    }

    constexpr long k() const { return k_; }
    constexpr bool odd() const { return (k_ % 2) == 1; }
    constexpr bool even() const { return !odd(); }
    /// (-1)^k
    constexpr double sign() const { return odd() ? -1.0 : 1.0; }
    constexpr KParity next() const { return KParity(k_ + 1); }

    friend constexpr bool operator==(KParity, KParity) = default;

private:
    long k_;
};

/// Scheduled orientation at impulse k.
inline double scheduled_theta(KParity k, const JuggleSpec& spec) {
    return k.odd() ? spec.theta_odd : spec.theta_even;
}

/// theta_{k+1} = theta_k + (-1)^{k+1} * delta_theta_star
inline double next_theta(double theta_k, KParity k, const JuggleSpec& spec) {
    return theta_k - k.sign() * spec.delta_theta_star();
}

struct FieldCheck {
    std::string field;
    bool ok = true;
    std::string message;
};

struct ValidationReport {
    std::vector<FieldCheck> checks;
    bool periodic_feasible = false;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }

    const FieldCheck* find(const std::string& field) const {
        for (const auto& c : checks)
            if (c.field == field) return &c;
        return nullptr;
    }

    std::string summary() const {
        std::string out;
        for (const auto& c : checks) {
            if (c.ok) continue;
            if (!out.empty()) out += "; ";
            out += c.field + ": " + c.message;
        }
        return out;
    }
};

inline ValidationReport validate(const JuggleSpec& spec, const StickParams& p) {
    constexpr double pi = std::numbers::pi;
    ValidationReport rep;
    auto check = [&](std::string field, bool ok, std::string msg) {
        rep.checks.push_back({std::move(field), ok, ok ? std::string{} : std::move(msg)});
    };
    auto positive = [&](const char* field, double x) {
        check(field, std::isfinite(x) && x > 0.0, "must be finite and > 0");
    };

    positive("m", p.m);
    positive("ell", p.ell);
    positive("J", p.J);
    positive("g", p.g);

    check("theta_odd", std::isfinite(spec.theta_odd) && spec.theta_odd > 0.0 && spec.theta_odd < pi / 2,
          "must lie in (0, pi/2)");
    check("theta_even",
          std::isfinite(spec.theta_even) && spec.theta_even > pi / 2 && spec.theta_even < pi,
          "must lie in (pi/2, pi)");
    check("delta_theta_star", spec.delta_theta_star() > 0.0, "theta_even - theta_odd must be > 0");
    positive("alpha", spec.alpha);
    positive("beta", spec.beta);
    auto rate = [&](const char* field, double x) {
        check(field, std::isfinite(x) && x >= 0.0 && x < 1.0, "must lie in [0, 1)");
    };
    rate("lambda_x", spec.lambda_x);
    rate("lambda_y", spec.lambda_y);

    rep.periodic_feasible = rep.ok() && spec.symmetric();
    return rep;
}

}  // namespace devilstick
