#pragma once

// Discrete virtual holonomic constraint h(k) = Phi(theta_k) with
// Phi(theta) = [alpha tan(theta), beta], its velocity counterpart Psi, and the
// impulse law that makes the position residual contract by lambda per impulse.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "devilstick/dynamics.hpp"
#include "devilstick/model.hpp"

namespace devilstick {

inline constexpr double kScheduleTol = 1e-9;

struct Residuals {
    Vec2 rho = Vec2::Zero();   // h - Phi(theta_k)
    Vec2 drho = Vec2::Zero();  // v - Psi(theta_k, omega_k)
};

struct EtaK {
    Vec2 eta = Vec2::Zero();   // Phi(theta_{k+1}) - Phi(theta_k)
};

inline Vec2 phi(double theta, const JuggleSpec& spec) {
    if (std::abs(std::cos(theta)) < 1e-9)
        throw Error(ErrorKind::Singular, "phi: tan(theta) is singular");
    return Vec2(spec.alpha * std::tan(theta), spec.beta);
}

inline EtaK eta(double theta_k, KParity k, const JuggleSpec& spec) {
    return {phi(next_theta(theta_k, k, spec), spec) - phi(theta_k, spec)};
}

/// Velocity the stick must have at impulse k for the constraint to hold at
/// both k and k+1 (given that it also held at k-1).
inline Vec2 psi(double theta_k, double omega_k, KParity k, const JuggleSpec& spec, const StickParams& p) {
    if (!(std::abs(omega_k) >= 1e-9)) throw Error(ErrorKind::Degenerate, "psi: omega_k ~ 0");
    // odd k rotates clockwise into the impulse, even k counter-clockwise
    if ((k.odd() && omega_k > 0.0) || (k.even() && omega_k < 0.0))
        throw Error(ErrorKind::WrongRotationSign, "psi: angular velocity has the wrong sign for this parity");
    const double dth = spec.delta_theta_star();
    const double theta_next = next_theta(theta_k, k, spec);
    const double sgn = k.sign();
    return Vec2(sgn * omega_k / dth * spec.alpha * (std::tan(theta_k) - std::tan(theta_next)),
                -sgn * p.g * dth / (2.0 * omega_k));
}

inline void require_on_schedule(double theta, KParity k, const JuggleSpec& spec) {
    if (!(std::abs(theta - scheduled_theta(k, spec)) <= kScheduleTol))
        throw Error(ErrorKind::OffSchedule, "state orientation does not match the schedule for this k");
}

inline Residuals residuals(const FullState& s, KParity k, const JuggleSpec& spec, const StickParams& p) {
    require_on_schedule(s.theta, k, spec);
    const double th = scheduled_theta(k, spec);
    return {s.h - phi(th, spec), s.v - psi(th, s.omega, k, spec, p)};
}

/// Impulse offset that sends the stick to the next scheduled angle after
/// delta seconds.
inline double offset_for_flight(double omega_k, double I, double delta, KParity k,
                                const JuggleSpec& spec, const StickParams& p) {
    if (std::abs(I * delta) < 1e-14) throw Error(ErrorKind::Degenerate, "zero impulse cannot set the flight time");
    return -k.sign() * p.J * spec.delta_theta_star() / (I * delta) - p.J * omega_k / I;
}

/// Coefficients (a, b, c) of a*delta^2 + b*delta + c = 0 whose positive root
/// is the flight time that makes rho_{k+1} = lambda rho_k.
struct FlightQuadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double operator()(double d) const { return (a * d + b) * d + c; }
    double scale(double d) const { return std::abs(a * d * d) + std::abs(b * d) + std::abs(c); }
};

inline FlightQuadratic flight_quadratic(const FullState& s, KParity k, const JuggleSpec& spec,
                                        const StickParams& p) {
    const Residuals res = residuals(s, k, spec, p);
    const double th = scheduled_theta(k, spec);
    const Vec2 ps = psi(th, s.omega, k, spec, p);
    const Vec2 et = eta(th, k, spec).eta;
    const double cot = std::cos(th) / std::sin(th);
    const Vec2 vel = res.drho + ps;  // = v(k)
    FlightQuadratic q;
    q.a = 0.5 * p.g;
    q.b = -(vel.x() * cot + vel.y());
    q.c = et.x() * cot + et.y() + (spec.lambda_x - 1.0) * res.rho.x() * cot +
          (spec.lambda_y - 1.0) * res.rho.y();
    return q;
}

/// Real roots of the quadratic, computed without cancellation.
inline std::optional<std::array<double, 2>> quadratic_roots(const FlightQuadratic& q) {
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (!(disc >= 0.0)) return std::nullopt;
    const double w = -0.5 * (q.b + std::copysign(std::sqrt(disc), q.b));
    if (w == 0.0) return std::array<double, 2>{0.0, 0.0};
    return std::array<double, 2>{w / q.a, q.c / w};
}

enum class RodPolicy { Strict, Warn };

/// Flight time of the steady (zero-residual) command at angular velocity omega_k.
inline double steady_delta(double omega_k, KParity k, const JuggleSpec& spec, const StickParams& p) {
    const double th = scheduled_theta(k, spec);
    const double tan_ratio = std::tan(next_theta(th, k, spec)) / std::tan(th);
    return k.sign() * 2.0 * omega_k * spec.alpha / (p.g * spec.delta_theta_star()) * (1.0 - tan_ratio);
}

/// Closed-form command for a state that already satisfies rho = drho = 0.
inline ImpulseCmd steady_inputs(double omega_k, KParity k, const JuggleSpec& spec, const StickParams& p) {
    if (!(std::abs(omega_k) >= 1e-9)) throw Error(ErrorKind::Degenerate, "steady_inputs: omega_k ~ 0");
    if ((k.odd() && omega_k > 0.0) || (k.even() && omega_k < 0.0))
        throw Error(ErrorKind::WrongRotationSign, "steady_inputs: angular velocity has the wrong sign");
    const double th = scheduled_theta(k, spec);
    const double dth = spec.delta_theta_star();
    const double shape = 1.0 - std::tan(next_theta(th, k, spec)) / std::tan(th);
    if (std::abs(shape) < 1e-12) throw Error(ErrorKind::Degenerate, "steady_inputs: tan ratio equals one");
    ImpulseCmd cmd;
    cmd.delta = k.sign() * 2.0 * omega_k * spec.alpha / (p.g * dth) * shape;
    cmd.I = k.sign() * p.m / std::cos(th) *
            (omega_k * spec.alpha / dth * shape + p.g * dth / (2.0 * omega_k));
    cmd.r = -k.sign() * p.J * dth * std::cos(th) / (p.m * spec.alpha * shape);
    if (!(cmd.delta > 0.0)) throw Error(ErrorKind::Infeasible, "steady_inputs: non-positive flight time");
    return cmd;
}

/// Impulse command enforcing rho_{k+1} = lambda rho_k from an arbitrary
/// (on-schedule) state.
inline ImpulseCmd dvhc_control(const FullState& s, KParity k, const JuggleSpec& spec, const StickParams& p,
                               RodPolicy policy = RodPolicy::Strict) {
    if (!s.finite()) throw Error(ErrorKind::NonFinite, "dvhc_control: non-finite state");
    const double th = scheduled_theta(k, spec);
    const double sin_th = std::sin(th);
    if (std::abs(sin_th) < 1e-12) throw Error(ErrorKind::Degenerate, "dvhc_control: sin(theta_k) = 0");

    const FlightQuadratic quad = flight_quadratic(s, k, spec, p);
    const auto roots = quadratic_roots(quad);
    if (!roots) throw Error(ErrorKind::NoPositiveRoot, "dvhc_control: complex flight-time roots");

    const double r0 = std::min((*roots)[0], (*roots)[1]);
    const double r1 = std::max((*roots)[0], (*roots)[1]);
    double delta = 0.0;
    if (r1 <= 0.0) {
        throw Error(ErrorKind::NoPositiveRoot, "dvhc_control: no positive flight-time root");
    } else if (r0 <= 0.0) {
        delta = r1;
    } else {
        // two positive roots: stay near the steady-state flight time
        const double nominal = steady_delta(s.omega, k, spec, p);
        delta = std::abs(r1 - nominal) < std::abs(r0 - nominal) ? r1 : r0;
    }

    const Residuals res = residuals(s, k, spec, p);
    const Vec2 vel = s.v;
    const double eta_x = eta(th, k, spec).eta.x();
    ImpulseCmd cmd;
    cmd.delta = delta;
    cmd.I = -p.m * ((spec.lambda_x - 1.0) * res.rho.x() + eta_x - vel.x() * delta) / (delta * sin_th);
    cmd.r = offset_for_flight(s.omega, cmd.I, delta, k, spec, p);
    if (!std::isfinite(cmd.I) || !std::isfinite(cmd.r))
        throw Error(ErrorKind::NonFinite, "dvhc_control: non-finite command");
    if (policy == RodPolicy::Strict && !(std::abs(cmd.r) < 0.5 * p.ell))
        throw Error(ErrorKind::RodExceeded, "dvhc_control: impulse offset lies off the stick");
    return cmd;
}

}  // namespace devilstick
