// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "devilstick/devilstick.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace devilstick;
constexpr double pi = std::numbers::pi;

namespace {

const StickParams kParams = make_params(0.1, 0.5);
const JuggleSpec kSpec{pi / 6, 5 * pi / 6, 0.6131, 3.0, 0.5, 0.5};
const FullState kInitial{Vec2(0.7, 2.5), Vec2(0.9, -2.0), pi / 6, -5.7};

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d: %s  [%s]\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

FullState on_constraint(double omega, KParity k, const JuggleSpec& spec) {
    FullState s;
    s.theta = scheduled_theta(k, spec);
    s.omega = omega;
    s.h = phi(s.theta, spec);
    s.v = psi(s.theta, omega, k, spec, kParams);
    return s;
}

StabilizerDesign reference_design() {
    StabilizerDesign d;
    d.omega_star = -4.1888;
    d.Q = Mat5::Identity();
    d.R = 2.0 * Eigen::Matrix2d::Identity();
    d.deadband = 1e-3;
    d.fd = {FdScheme::Forward, 2e-3};
    return d;
}

void criterion1() {
    const EpisodeLog log = run_episode(kInitial, kSpec, kParams, EpisodeConfig{});
    if (log.records.size() != 20) {
        report(1, "2-periodic convergence", false, "episode ended early: " + log.message);
        return;
    }
    const auto& o = log.records[18];
    const auto& e = log.records[19];
    double err = 0.0;
    err = std::max(err, std::abs(o.pre.omega - reference::kOmegaOdd2P));
    err = std::max(err, std::abs(e.pre.omega - reference::kOmegaEven2P));
    err = std::max(err, std::abs(o.cmd.delta - reference::kDeltaOdd2P));
    err = std::max(err, std::abs(e.cmd.delta - reference::kDeltaEven2P));
    err = std::max(err, std::abs(o.cmd.I - reference::kImpulse2P));
    err = std::max(err, std::abs(e.cmd.I + reference::kImpulse2P));
    err = std::max(err, std::abs(o.cmd.r - reference::kOffset));
    err = std::max(err, std::abs(e.cmd.r - reference::kOffset));
    const double dur = std::abs(log.duration - reference::kDuration2P);
    report(1, "2-periodic convergence", err < 1e-3 && dur < 0.05,
           fmt("omega %.5f/%.5f delta %.5f/%.5f I %.5f/%.5f r %.5f; max err %.2e (tol 1e-3); elapsed %.4f s (tol 0.05)",
               o.pre.omega, e.pre.omega, o.cmd.delta, e.cmd.delta, o.cmd.I, e.cmd.I, e.cmd.r, err, log.duration));
}

void criterion2() {
    double worst = 0.0;
    std::size_t steps = 0;
    for (bool stab : {false, true}) {
        EpisodeConfig cfg;
        if (stab) cfg.stabilizer = make_stabilizer(kSpec, kParams, reference_design());
        const EpisodeLog log = run_episode(kInitial, kSpec, kParams, cfg);
        for (std::size_t i = 1; i < log.records.size(); ++i) {
            const auto& a = log.records[i - 1];
            const auto& b = log.records[i];
            if (a.u) continue;  // feedback deliberately moves off the 0.5 contraction
            worst = std::max(worst, (b.res.rho - 0.5 * a.res.rho).cwiseAbs().maxCoeff());
            worst = std::max(worst, (b.res.drho + 0.5 * a.res.rho / a.cmd.delta).cwiseAbs().maxCoeff());
            ++steps;
        }
    }
    report(2, "exponential constraint enforcement", worst < 1e-9 && steps > 30,
           fmt("%zu steps, max deviation %.2e (tol 1e-9)", steps, worst));
}

void criterion3() {
    EpisodeConfig cfg;
    cfg.stabilizer = make_stabilizer(kSpec, kParams, reference_design());
    const EpisodeLog log = run_episode(kInitial, kSpec, kParams, cfg);
    if (log.records.size() != 20) {
        report(3, "symmetric-orbit stabilization", false, "episode ended early: " + log.message);
        return;
    }
    const auto& o = log.records[18];
    const auto& e = log.records[19];
    double err = 0.0;
    err = std::max(err, std::abs(o.pre.omega - reference::kOmegaStarSym));
    err = std::max(err, std::abs(o.cmd.delta - reference::kDeltaSym));
    err = std::max(err, std::abs(e.cmd.delta - reference::kDeltaSym));
    err = std::max(err, std::abs(o.cmd.I - reference::kImpulseSym));
    err = std::max(err, std::abs(e.cmd.I + reference::kImpulseSym));
    err = std::max(err, std::abs(o.cmd.r - reference::kOffset));
    err = std::max(err, std::abs(e.cmd.r - reference::kOffset));
    bool inside = false, stays_off = true;
    for (const auto& r : log.records) {
        if (!r.section_error) continue;
        if (inside && r.u) stays_off = false;
        if (*r.section_error < cfg.stabilizer->gain.deadband) inside = true;
    }
    const EpisodeMetrics m = metrics(log);
    report(3, "symmetric-orbit stabilization", err < 1e-3 && inside && stays_off,
           fmt("omega %.5f delta %.5f/%.5f I %.5f/%.5f r %.5f; max err %.2e (tol 1e-3); "
               "feedback last active at k=%ld, inactive afterwards: %s; elapsed %.4f s",
               o.pre.omega, o.cmd.delta, e.cmd.delta, o.cmd.I, e.cmd.I, o.cmd.r, err,
               m.last_feedback_k.value_or(0), (inside && stays_off) ? "yes" : "no", log.duration));
}

void criterion4() {
    const OrbitSpec orbit = design_orbit(kSpec, symmetric_omega_star(kSpec, kParams), kParams);
    const FixedPoint fp = fixed_point(orbit, kParams);
    const double resid = (poincare_map(fp.z, fp.I, fp.r, orbit, kParams).z - fp.z.z).cwiseAbs().maxCoeff();
    const double zerr = max_abs(fp.z.z - reference::z_star());
    const double ierr = std::max(std::abs(fp.I - reference::kImpulseSym), std::abs(fp.r - reference::kOffset));
    report(4, "fixed point", resid < 1e-9 && zerr < 1e-4 && ierr < 1e-4,
           fmt("map residual %.2e (tol 1e-9); z* vs reference %.2e, (I*, r*) = (%.5f, %.5f) vs reference %.2e (4-decimal "
               "rounding, tol 1e-4)",
               resid, zerr, fp.I, fp.r, ierr));
}

void criterion5() {
    const OrbitSpec orbit = design_orbit(kSpec, symmetric_omega_star(kSpec, kParams), kParams);
    const LinearizedMap fwd = linearize(orbit, kParams, {FdScheme::Forward, 2e-3});
    const LinearizedMap cen = linearize(orbit, kParams, {FdScheme::Central, 1e-6});
    const double ea = max_abs(fwd.A - reference::A());
    const double eb = max_abs(fwd.B - reference::B());
    const double lam = std::max(std::abs(cen.A(0, 0) - 0.25), std::abs(cen.A(1, 1) - 0.25));
    report(5, "linearization match", ea < 2e-2 && eb < 2e-2 && lam < 1e-6,
           fmt("forward step 2e-3: |A-A_ref| %.2e, |B-B_ref| %.2e (tol 2e-2); central A11/A22 err %.2e "
               "(tol 1e-6); central vs reference: A %.2e, B %.2e",
               ea, eb, lam, max_abs(cen.A - reference::A()), max_abs(cen.B - reference::B())));
}

void criterion6() {
    const Mat5 Q = Mat5::Identity();
    const Eigen::Matrix2d R = 2.0 * Eigen::Matrix2d::Identity();
    const SectionGain reference = dlqr<5, 2>(reference::A(), reference::B(), Q, R);
    const double ek = max_abs(reference.K - reference::K());
    const double rho_p = spectral_radius(reference::A() + reference::B() * reference.K);

    const OrbitSpec orbit = design_orbit(kSpec, symmetric_omega_star(kSpec, kParams), kParams);
    const LinearizedMap fwd = linearize(orbit, kParams, {FdScheme::Forward, 2e-3});
    const SectionGain own = dlqr<5, 2>(fwd.A, fwd.B, Q, R);
    const double ek_own = max_abs(own.K - reference::K());
    const double rho_own = spectral_radius(fwd.A + fwd.B * own.K);
    report(6, "gain match", ek < 5e-3 && rho_p < 1.0 && ek_own < 5e-3 && rho_own < 1.0,
           fmt("K from reference (A,B): err %.2e, rho %.4f; K from computed (A,B): err %.2e, rho %.4f (tol 5e-3, rho<1; "
               "u = K e, no sign flip)",
               ek, rho_p, ek_own, rho_own));
}

void criterion7() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> th(0.1, pi / 2 - 0.1), a(0.1, 2.0), b(0.5, 5.0), w(0.2, 15.0);
    double sym_worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double t = th(rng);
        const JuggleSpec spec{t, pi - t, a(rng), b(rng), 0.5, 0.5};
        const double w0 = -w(rng);
        const DzdState s2 = dzd_step(dzd_step({t, w0, KParity{1}}, spec, kParams), spec, kParams);
        sym_worst = std::max(sym_worst, std::abs(s2.omega - w0) / std::abs(w0));
    }
    double asym_worst = 0.0;
    int made = 0;
    while (made < 50) {
        const double t1 = th(rng), t2 = pi / 2 + th(rng);
        const JuggleSpec spec{t1, t2, a(rng), b(rng), 0.5, 0.5};
        if (spec.symmetric() || std::abs(growth_factor(spec) - 1.0) < 1e-3) continue;
        ++made;
        const double w0 = -w(rng);
        DzdState s{t1, w0, KParity{1}};
        const int N = 6;
        for (int n = 0; n < 2 * N; ++n) s = dzd_step(s, spec, kParams);
        const double expect = std::pow(growth_factor(spec), N);
        asym_worst = std::max(asym_worst, std::abs(std::abs(s.omega / w0) - expect) / expect);
    }
    report(7, "zero-dynamics property suite", sym_worst < 1e-10 && asym_worst < 1e-6,
           fmt("50 symmetric: max |w2-w0|/|w0| %.2e (tol 1e-10); 50 asymmetric: max rel err vs growth^N %.2e "
               "(tol 1e-6)",
               sym_worst, asym_worst));
}

void criterion8() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> th(0.15, pi / 2 - 0.15), a(0.2, 2.0), b(1.0, 4.0), w(0.8, 8.0);
    double steady_worst = 0.0;
    int n_steady = 0;
    while (n_steady < 1000) {
        const double t = th(rng);
        const bool symmetric = n_steady % 2 == 0;
        const JuggleSpec spec{t, symmetric ? pi - t : pi / 2 + th(rng), a(rng), b(rng), 0.5, 0.5};
        const KParity k{1 + n_steady % 4 / 2};
        const double omega = (k.odd() ? -1.0 : 1.0) * w(rng);
        ImpulseCmd ref;
        try {
            ref = steady_inputs(omega, k, spec, kParams);
        } catch (const Error&) {
            continue;  // no positive steady flight at this (spec, omega)
        }
        const ImpulseCmd got = dvhc_control(on_constraint(omega, k, spec), k, spec, kParams, RodPolicy::Warn);
        steady_worst = std::max({steady_worst, std::abs(got.delta - ref.delta) / std::max(1.0, ref.delta),
                                 std::abs(got.I - ref.I) / std::max(1.0, std::abs(ref.I)),
                                 std::abs(got.r - ref.r) / std::max(1.0, std::abs(ref.r))});
        ++n_steady;
    }

    const oracle::Plant P;
    std::uniform_real_distribution<double> dh(-0.5, 0.5), dv(-1.5, 1.5), wk(2.0, 7.0);
    double root_worst = 0.0;
    int n_roots = 0, confirmed = 0, no_root_agree = 0, no_root_total = 0;
    while (n_roots < 1000) {
        const KParity k{1 + (n_roots + no_root_total) % 2};
        FullState s = on_constraint((k.odd() ? -1.0 : 1.0) * wk(rng), k, kSpec);
        s.h += Vec2(dh(rng), dh(rng));
        s.v += Vec2(dv(rng), dv(rng));
        const double h[2] = {s.h.x(), s.h.y()}, v[2] = {s.v.x(), s.v.y()};
        const auto roots = oracle::scan_roots([&](double d) { return oracle::flight_equation(P, k.k(), h, v, d); },
                                              1e-9, 5.0, 5000);
        ImpulseCmd cmd;
        try {
            cmd = dvhc_control(s, k, kSpec, kParams, RodPolicy::Warn);
        } catch (const Error& e) {
            ++no_root_total;
            if (e.kind() == ErrorKind::NoPositiveRoot && roots.empty()) ++no_root_agree;
            continue;
        }
        const FlightQuadratic q = flight_quadratic(s, k, kSpec, kParams);
        root_worst = std::max(root_worst, std::abs(q(cmd.delta)) / q.scale(cmd.delta));
        for (double r : roots)
            if (std::abs(r - cmd.delta) < 1e-9 * std::max(1.0, r)) {
                ++confirmed;
                break;
            }
        ++n_roots;
    }
    report(8, "oracle equivalence",
           steady_worst < 1e-10 && root_worst < 1e-10 && confirmed == n_roots && no_root_agree == no_root_total,
           fmt("1000 zero-residual states: max rel diff vs steady inputs %.2e (tol 1e-10); 1000 off-constraint "
               "states: max scaled root residual %.2e (tol 1e-10), oracle confirmed %d/%d, infeasible %d/%d agree",
               steady_worst, root_worst, confirmed, n_roots, no_root_agree, no_root_total));
}

void criterion9() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0), d(0.0, 2.0);
    double energy = 0.0, vx = 0.0, om = 0.0;
    for (int i = 0; i < 1000; ++i) {
        FullState s{Vec2(u(rng), 3.0 + u(rng)), Vec2(u(rng), u(rng)), u(rng), 3.0 * u(rng)};
        const FullState f = flight(s, d(rng), kParams);
        energy = std::max(energy, std::abs(mechanical_energy(f, kParams) - mechanical_energy(s, kParams)));
        vx = std::max(vx, std::abs(f.v.x() - s.v.x()));
        om = std::max(om, std::abs(f.omega - s.omega));
    }
    const OrbitSpec orbit = design_orbit(kSpec, symmetric_omega_star(kSpec, kParams), kParams);
    double halving = 0.0;
    bool fd_ok = true;
    try {
        halving = linearize(orbit, kParams, {FdScheme::Central, 1e-6}).halving_excess;
    } catch (const Error&) {
        fd_ok = false;
    }
    const Mat5 Q = Mat5::Identity();
    const Eigen::Matrix2d R = 2.0 * Eigen::Matrix2d::Identity();
    const SectionGain g = dlqr<5, 2>(reference::A(), reference::B(), Q, R);
    const double dare = max_abs(riccati_update<5, 2>(g.P, reference::A(), reference::B(), Q, R) - g.P);
    report(9, "conservation and consistency", energy < 1e-12 && vx < 1e-12 && om < 1e-12 && fd_ok && dare < 1e-10,
           fmt("1000 flights: energy %.1e, v_x %.1e, omega %.1e (tol 1e-12); central FD halving %s (excess %.2e); "
               "DARE residual %.2e (tol 1e-10)",
               energy, vx, om, fd_ok ? "consistent" : "inconsistent", halving, dare));
}

}  // namespace

int main() {
    auto guarded = [](int id, void (*fn)()) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, "unexpected error", false, e.what());
        }
    };
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
