#pragma once

#include <cmath>
#include <vector>

#include "devilstick/model.hpp"

namespace devilstick {

/// Velocity jump caused by an impulse I applied normal to the stick at
/// offset r from the center of mass.  Positions and orientation do not jump.
inline FullState impulsive_update(const FullState& s, double I, double r, const StickParams& p) {
    if (!s.finite() || !std::isfinite(I) || !std::isfinite(r))
        throw Error(ErrorKind::NonFinite, "impulsive_update: non-finite input");
    FullState out = s;
    out.v += (I / p.m) * Vec2(-std::sin(s.theta), std::cos(s.theta));
    out.omega += I * r / p.J;
    return out;
}

/// Free flight under gravity, evaluated in closed form.
inline FullState flight(const FullState& s, double delta, const StickParams& p) {
    if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "flight: delta must be >= 0");
    if (!s.finite()) throw Error(ErrorKind::NonFinite, "flight: non-finite state");
    FullState out = s;
    out.h = s.h + s.v * delta + Vec2(0.0, -0.5 * p.g * delta * delta);
    out.v = s.v + Vec2(0.0, -p.g * delta);
    out.theta = s.theta + s.omega * delta;
    return out;
}

/// One impulse followed by a flight of cmd.delta.
inline FullState hybrid_step(const FullState& s, const ImpulseCmd& cmd, const StickParams& p) {
    if (!(cmd.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "hybrid_step: delta must be > 0");
    return flight(impulsive_update(s, cmd.I, cmd.r, p), cmd.delta, p);
}

/// Flight time that carries the stick from theta_k to the next scheduled
/// orientation after the impulse (I, r).
inline double time_of_flight(double theta_k, double omega_k, double I, double r, KParity k,
                             const JuggleSpec& spec, const StickParams& p) {
    (void)theta_k;
    const double omega_next = omega_k + I * r / p.J;
    if (!std::isfinite(omega_next)) throw Error(ErrorKind::NonFinite, "time_of_flight: non-finite input");
    if (std::abs(omega_next) < 1e-12)
        throw Error(ErrorKind::Degenerate, "time_of_flight: post-impulse angular velocity vanishes");
    const double delta = -k.sign() * spec.delta_theta_star() / omega_next;
    if (!(delta > 0.0))
        throw Error(ErrorKind::Infeasible, "time_of_flight: post-impulse rotation has the wrong direction");
    return delta;
}

inline double mechanical_energy(const FullState& s, const StickParams& p) {
    return p.m * p.g * s.h.y() + 0.5 * p.m * s.v.squaredNorm() + 0.5 * p.J * s.omega * s.omega;
}

struct FlightSample {
    double t = 0.0;  // time since the impulse
    FullState state;
};

/// Dense samples of a flight at t = 0, dt, 2dt, ... with the final sample
/// exactly at delta.
inline std::vector<FlightSample> sample_flight(const FullState& s_plus, double delta, double dt,
                                               const StickParams& p) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_flight: dt must be > 0");
    if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_flight: delta must be >= 0");
    std::vector<FlightSample> out;
    const double eps = 1e-9 * std::max(1.0, delta);
    for (long i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (t >= delta - eps) break;
        out.push_back({t, flight(s_plus, t, p)});
    }
    out.push_back({delta, flight(s_plus, delta, p)});
    return out;
}

}  // namespace devilstick
