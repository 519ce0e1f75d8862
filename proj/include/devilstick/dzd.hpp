#pragma once

// Zero dynamics of the passive pair (theta_k, omega_k) on the constraint
// manifold, and the family of 2-periodic juggling orbits it admits.

#include <cmath>

#include "devilstick/dvhc.hpp"
#include "devilstick/model.hpp"

namespace devilstick {

struct DzdState {
    double theta = 0.0;
    double omega = 0.0;
    KParity k{1};
};

/// omega_{k+1} from the zero-dynamics relation
///   g dth^2 / (2 omega_k omega_{k+1}) + alpha (1 - tan th_{k+1} / tan th_k) = 0
inline DzdState dzd_step(const DzdState& s, const JuggleSpec& spec, const StickParams& p) {
    if ((s.k.odd() && !(s.omega < 0.0)) || (s.k.even() && !(s.omega > 0.0)))
        throw Error(ErrorKind::WrongRotationSign, "dzd_step: angular velocity has the wrong sign");
    const double dth = spec.delta_theta_star();
    const double theta_next = next_theta(s.theta, s.k, spec);
    const double shape = 1.0 - std::tan(theta_next) / std::tan(s.theta);
    if (std::abs(shape) < 1e-12) throw Error(ErrorKind::Degenerate, "dzd_step: tan factor vanishes");
    const double omega_next = -p.g * dth * dth / (2.0 * s.omega * spec.alpha * shape);
    return {theta_next, omega_next, s.k.next()};
}

/// Two-step multiplier on omega at the odd orientation.  Equal to one iff the
/// orientations are mirror images about the vertical.
inline double growth_factor(const JuggleSpec& spec) {
    return -std::tan(spec.theta_even) / std::tan(spec.theta_odd);
}

/// A 2-periodic juggling orbit, parameterized by the odd-instant angular
/// velocity omega_star < 0.
struct OrbitSpec {
    JuggleSpec spec;
    double omega_star = 0.0;
    double omega_even = 0.0;
    double delta_odd = 0.0;
    double delta_even = 0.0;
    double I_mag = 0.0;
    double r_star = 0.0;
};

inline OrbitSpec design_orbit(const JuggleSpec& spec, double omega_star, const StickParams& p) {
    if (!spec.symmetric())
        throw Error(ErrorKind::AsymmetricSpec, "design_orbit: no 2-periodic orbit exists for asymmetric orientations");
    if (!(omega_star < 0.0)) throw Error(ErrorKind::WrongSign, "design_orbit: omega_star must be < 0");
    const double dth = spec.delta_theta_star();
    const double a = spec.alpha;
    OrbitSpec o;
    o.spec = spec;
    o.omega_star = omega_star;
    o.omega_even = -p.g * dth * dth / (4.0 * omega_star * a);
    o.delta_odd = -4.0 * omega_star * a / (p.g * dth);
    o.delta_even = -dth / omega_star;
    // impulse at the odd instant; the even one has the same magnitude, opposite sign
    o.I_mag = -2.0 * p.m * a / (dth * std::cos(spec.theta_odd)) *
              (omega_star + p.g * dth * dth / (4.0 * omega_star * a));
    o.r_star = p.J * dth * std::cos(spec.theta_odd) / (2.0 * p.m * a);
    return o;
}

/// omega_star of the orbit that is symmetric in angular velocity as well.
inline double symmetric_omega_star(const JuggleSpec& spec, const StickParams& p) {
    if (!spec.symmetric())
        throw Error(ErrorKind::AsymmetricSpec, "symmetric_omega_star: orientations are not symmetric");
    return -0.5 * spec.delta_theta_star() * std::sqrt(p.g / spec.alpha);
}

/// Left-hand side of the zero-dynamics relation; zero along any DZD solution.
inline double dzd_residual(double theta_k, double omega_k, double omega_next, KParity k,
                           const JuggleSpec& spec, const StickParams& p) {
    const double dth = spec.delta_theta_star();
    const double shape = 1.0 - std::tan(next_theta(theta_k, k, spec)) / std::tan(theta_k);
    return p.g * dth * dth / (2.0 * omega_k * omega_next) + spec.alpha * shape;
}

}  // namespace devilstick
