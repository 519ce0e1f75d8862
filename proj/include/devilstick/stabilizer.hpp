#pragma once

// Orbital stabilization through the impulse-controlled return map on the
// section {theta = theta_odd, omega < 0}: fixed point, finite-difference
// linearization, controllability, discrete LQR and deadbanded feedback.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "devilstick/dvhc.hpp"
#include "devilstick/dynamics.hpp"
#include "devilstick/dzd.hpp"

namespace devilstick {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat52 = Eigen::Matrix<double, 5, 2>;
using Mat25 = Eigen::Matrix<double, 2, 5>;

/// z = [h_x, h_y, v_x, v_y, omega] just before the odd impulse.
struct SectionState {
    Vec5 z = Vec5::Zero();
};

inline SectionState to_section(const FullState& s, const JuggleSpec& spec) {
    if (!(std::abs(s.theta - spec.theta_odd) <= kScheduleTol) || !(s.omega < 0.0))
        throw Error(ErrorKind::NotOnSection, "to_section: state is not on theta = theta_odd with omega < 0");
    SectionState out;
    out.z << s.h.x(), s.h.y(), s.v.x(), s.v.y(), s.omega;
    return out;
}

inline FullState from_section(const SectionState& sec, const JuggleSpec& spec) {
    if (!sec.z.allFinite() || !(sec.z(4) < 0.0))
        throw Error(ErrorKind::NotOnSection, "from_section: section state needs finite entries and omega < 0");
    FullState s;
    s.h = Vec2(sec.z(0), sec.z(1));
    s.v = Vec2(sec.z(2), sec.z(3));
    s.theta = spec.theta_odd;
    s.omega = sec.z(4);
    return s;
}

/// Fly with (I, r) from an on-schedule state and land exactly on the next
/// scheduled orientation.
inline FullState advance(const FullState& s, KParity k, double I, double r, const JuggleSpec& spec,
                         const StickParams& p, double* delta_out = nullptr) {
    const double delta = time_of_flight(s.theta, s.omega, I, r, k, spec, p);
    FullState out = hybrid_step(s, ImpulseCmd{I, r, delta}, p);
    const double target = scheduled_theta(k.next(), spec);
    if (!(std::abs(out.theta - target) <= kScheduleTol))
        throw Error(ErrorKind::OffSchedule, "advance: flight missed the scheduled orientation");
    out.theta = target;
    if (delta_out) *delta_out = delta;
    return out;
}

struct FixedPoint {
    SectionState z;
    double I = 0.0;
    double r = 0.0;
};

inline FixedPoint fixed_point(const OrbitSpec& orbit, const StickParams& p) {
    const JuggleSpec& spec = orbit.spec;
    const KParity odd{1};
    const Vec2 pos = phi(spec.theta_odd, spec);
    const Vec2 vel = psi(spec.theta_odd, orbit.omega_star, odd, spec, p);
    const ImpulseCmd steady = steady_inputs(orbit.omega_star, odd, spec, p);
    FixedPoint fp;
    fp.z.z << pos.x(), pos.y(), vel.x(), vel.y(), orbit.omega_star;
    fp.I = steady.I;
    fp.r = steady.r;
    return fp;
}

/// Return map driven by an input offset u = [dI, dr] added to the nominal
/// constraint-enforcing command at the odd instant.  The even instant uses
/// the nominal command only.
inline SectionState poincare_map_offset(const SectionState& z, const Vec2& u, const OrbitSpec& orbit,
                                        const StickParams& p, RodPolicy policy = RodPolicy::Strict) {
    const JuggleSpec& spec = orbit.spec;
    const KParity odd{1};
    const KParity even{2};
    FullState s = from_section(z, spec);

    const ImpulseCmd nominal = dvhc_control(s, odd, spec, p, RodPolicy::Warn);
    const double I = nominal.I + u.x();
    const double r = nominal.r + u.y();
    if (policy == RodPolicy::Strict && !(std::abs(r) < 0.5 * p.ell))
        throw Error(ErrorKind::RodExceeded, "poincare_map: impulse offset lies off the stick");
    s = advance(s, odd, I, r, spec, p);

    const ImpulseCmd back = dvhc_control(s, even, spec, p, policy);
    s = advance(s, even, back.I, back.r, spec, p);
    return to_section(s, spec);
}

/// Return map in terms of the total odd-instant inputs (I, r); at the fixed
/// point inputs (I*, r*) the offset is zero.
inline SectionState poincare_map(const SectionState& z, double I, double r, const OrbitSpec& orbit,
                                 const StickParams& p) {
    const FixedPoint fp = fixed_point(orbit, p);
    return poincare_map_offset(z, Vec2(I - fp.I, r - fp.r), orbit, p);
}

enum class FdScheme { Central, Forward };

struct LinearizeOptions {
    FdScheme scheme = FdScheme::Central;
    /// Central: relative step, h_i = step * max(1, |x_i|).  Forward: absolute step.
    double step = 1e-6;
};

struct LinearizedMap {
    Mat5 A = Mat5::Zero();
    Mat52 B = Mat52::Zero();
    SectionState z_star;
    Vec2 u_star = Vec2::Zero();  // [I*, r*]
    /// Largest step-halving excess |X_h - X_{h/2}| - max(1e-4, 1e-3 |X_h|); <= 0 means consistent.
    double halving_excess = 0.0;
};

namespace detail {

template <int N, class F>
Eigen::Matrix<double, 5, N> fd_columns(F&& map, const Vec5& base, const Eigen::Matrix<double, N, 1>& x0,
                                       FdScheme scheme, double step) {
    Eigen::Matrix<double, 5, N> J;
    for (int i = 0; i < N; ++i) {
        Eigen::Matrix<double, N, 1> dx = Eigen::Matrix<double, N, 1>::Zero();
        if (scheme == FdScheme::Central) {
            const double h = step * std::max(1.0, std::abs(x0(i)));
            dx(i) = h;
            J.col(i) = (map(dx) - map(-dx)) / (2.0 * h);
        } else {
            dx(i) = step;
            J.col(i) = (map(dx) - base) / step;
        }
    }
    return J;
}

inline double halving_excess(const Eigen::MatrixXd& coarse, const Eigen::MatrixXd& fine) {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < coarse.size(); ++i) {
        const double a = coarse.data()[i];
        const double tol = std::max(1e-4, 1e-3 * std::abs(a));
        worst = std::max(worst, std::abs(a - fine.data()[i]) - tol);
    }
    return worst;
}

}  // namespace detail

/// Jacobians of the return map about its fixed point.  The central scheme is
/// checked against a half-step evaluation and throws FDInconsistent if the
/// two disagree; the forward scheme only reports the excess.
inline LinearizedMap linearize(const OrbitSpec& orbit, const StickParams& p, const LinearizeOptions& opt = {}) {
    if (!(opt.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "linearize: step must be > 0");
    const FixedPoint fp = fixed_point(orbit, p);
    const Vec5 z_star = fp.z.z;
    const Vec2 u_star(fp.I, fp.r);
    // Probe with the Warn policy: feasibility is judged at the fixed point only.
    auto map_z = [&](const Vec5& dz) {
        return poincare_map_offset(SectionState{z_star + dz}, Vec2::Zero(), orbit, p, RodPolicy::Warn).z;
    };
    auto map_u = [&](const Vec2& du) {
        return poincare_map_offset(fp.z, du, orbit, p, RodPolicy::Warn).z;
    };
    const Vec5 base = map_z(Vec5::Zero());

    auto jac = [&](double step, Mat5& A, Mat52& B) {
        A = detail::fd_columns<5>(map_z, base, z_star, opt.scheme, step);
        B = detail::fd_columns<2>(map_u, base, u_star, opt.scheme, step);
    };

    LinearizedMap lin;
    lin.z_star = fp.z;
    lin.u_star = u_star;
    jac(opt.step, lin.A, lin.B);

    Mat5 A_half;
    Mat52 B_half;
    jac(0.5 * opt.step, A_half, B_half);
    lin.halving_excess = std::max(detail::halving_excess(lin.A, A_half), detail::halving_excess(lin.B, B_half));
    if (opt.scheme == FdScheme::Central && lin.halving_excess > 0.0)
        throw Error(ErrorKind::FDInconsistent, "linearize: Jacobian changes under step halving");
    return lin;
}

struct ControllabilityResult {
    int rank = 0;
    bool controllable = false;
};

template <int N, int M>
ControllabilityResult controllability(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, M>& B) {
    Eigen::Matrix<double, N, N * M> C;
    Eigen::Matrix<double, N, M> block = B;
    for (int i = 0; i < N; ++i) {
        C.template block<N, M>(0, i * M) = block;
        block = A * block;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double tol = smax * N * std::numeric_limits<double>::epsilon() * 1e3;
    ControllabilityResult res;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol && sv(i) > 0.0) ++res.rank;
    res.controllable = res.rank == N;
    return res;
}

template <class Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M.eval());
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <int N, int M>
struct FeedbackGain {
    Eigen::Matrix<double, M, N> K = Eigen::Matrix<double, M, N>::Zero();
    double deadband = 1e-3;
    Eigen::Matrix<double, N, N> P = Eigen::Matrix<double, N, N>::Zero();
    int iterations = 0;
};

using SectionGain = FeedbackGain<5, 2>;

/// Riccati map  Q + A'PA - A'PB (R + B'PB)^-1 B'PA.
template <int N, int M>
Eigen::Matrix<double, N, N> riccati_update(const Eigen::Matrix<double, N, N>& P, const Eigen::Matrix<double, N, N>& A,
                                           const Eigen::Matrix<double, N, M>& B,
                                           const Eigen::Matrix<double, N, N>& Q,
                                           const Eigen::Matrix<double, M, M>& R) {
    const Eigen::Matrix<double, M, M> S = R + B.transpose() * P * B;
    const Eigen::Matrix<double, M, N> BtPA = B.transpose() * P * A;
    Eigen::Matrix<double, N, N> next = Q + A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA);
    return 0.5 * (next + next.transpose());
}

/// Infinite-horizon discrete LQR by fixed-point Riccati iteration.  The
/// returned K includes the minus sign, so u = K e is the stabilizing law.
template <int N, int M>
FeedbackGain<N, M> dlqr(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, M>& B,
                        const Eigen::Matrix<double, N, N>& Q, const Eigen::Matrix<double, M, M>& R,
                        double tol = 1e-12, int max_iter = 100000) {
    Eigen::Matrix<double, N, N> P = Q;
    FeedbackGain<N, M> out;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::Matrix<double, N, N> next = riccati_update<N, M>(P, A, B, Q, R);
        if (!next.allFinite()) throw Error(ErrorKind::RiccatiDiverged, "dlqr: Riccati iterate is not finite");
        const double change = (next - P).cwiseAbs().rowwise().sum().maxCoeff();
        P = next;
        out.iterations = it;
        if (change < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw Error(ErrorKind::RiccatiDiverged, "dlqr: Riccati iteration did not converge");
    const Eigen::Matrix<double, M, M> S = R + B.transpose() * P * B;
    out.K = -S.ldlt().solve(B.transpose() * P * A);
    out.P = P;
    if (spectral_radius(A + B * out.K) >= 1.0 - 1e-9)
        throw Error(ErrorKind::NotStabilizing, "dlqr: closed loop is not Schur stable");
    return out;
}

/// u = K (z - z*) outside the deadband, zero inside it.
inline Vec2 feedback(const SectionState& z, const LinearizedMap& lin, const SectionGain& gain) {
    const Vec5 e = z.z - lin.z_star.z;
    if (!(e.norm() > gain.deadband)) return Vec2::Zero();
    return gain.K * e;
}

}  // namespace devilstick
