#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "devilstick/dvhc.hpp"
#include "devilstick/dynamics.hpp"
#include "devilstick/dzd.hpp"
#include "devilstick/stabilizer.hpp"

namespace devilstick {

/// Everything the orbit-stabilizing feedback needs at run time.
struct Stabilizer {
    OrbitSpec orbit;
    LinearizedMap lin;
    SectionGain gain;
};

struct StabilizerDesign {
    double omega_star = 0.0;
    Mat5 Q = Mat5::Identity();
    Eigen::Matrix2d R = 2.0 * Eigen::Matrix2d::Identity();
    double deadband = 1e-3;
    LinearizeOptions fd;
};

inline Stabilizer make_stabilizer(const JuggleSpec& spec, const StickParams& p, const StabilizerDesign& d) {
    Stabilizer st;
    st.orbit = design_orbit(spec, d.omega_star, p);
    st.lin = linearize(st.orbit, p, d.fd);
    st.gain = dlqr<5, 2>(st.lin.A, st.lin.B, d.Q, d.R);
    st.gain.deadband = d.deadband;
    return st;
}

struct EpisodeConfig {
    long k_max = 20;
    std::optional<Stabilizer> stabilizer;
    RodPolicy rod_policy = RodPolicy::Strict;
    double sample_dt = 0.01;  // <= 0 disables trajectory sampling
};

struct ImpulseRecord {
    long k = 0;
    double t = 0.0;  // time of the impulse since k = 1
    FullState pre;   // state just before the impulse
    Residuals res;
    ImpulseCmd cmd;  // applied command, feedback included
    std::optional<Vec2> u;
    std::optional<double> section_error;  // ||z - z*|| at odd k when stabilizing
    bool rod_exceeded = false;
};

struct TrajectoryPoint {
    double t = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double theta = 0.0;
};

enum class Termination { Completed, Error };

struct EpisodeLog {
    std::vector<ImpulseRecord> records;
    std::vector<TrajectoryPoint> trajectory;
    /// Simulated time from the first to the last logged impulse.
    double duration = 0.0;
    Termination termination = Termination::Completed;
    std::optional<ErrorKind> error_kind;
    std::string message;
    JuggleSpec spec;
    std::optional<FixedPoint> fixed_point;
};

/// Runs impulses k = 1..k_max from s0 (which must sit at theta_odd).  Plant or
/// controller failures end the episode and are recorded; nothing is thrown.
inline EpisodeLog run_episode(const FullState& s0, const JuggleSpec& spec, const StickParams& p,
                              const EpisodeConfig& cfg) {
    EpisodeLog log;
    log.spec = spec;
    if (cfg.stabilizer) log.fixed_point = fixed_point(cfg.stabilizer->orbit, p);

    FullState s = s0;
    double t = 0.0;
    try {
        if (cfg.k_max < 1) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 1");
        const ValidationReport rep = validate(spec, p);
        if (!rep.ok()) throw Error(ErrorKind::Validation, rep.summary());
        if (!s.finite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
        require_on_schedule(s.theta, KParity{1}, spec);
        s.theta = spec.theta_odd;

        for (long kk = 1; kk <= cfg.k_max; ++kk) {
            const KParity k{kk};
            ImpulseRecord rec;
            rec.k = kk;
            rec.t = t;
            rec.pre = s;
            rec.res = residuals(s, k, spec, p);

            ImpulseCmd cmd = dvhc_control(s, k, spec, p, RodPolicy::Warn);
            if (k.odd() && cfg.stabilizer) {
                const SectionState z = to_section(s, spec);
                rec.section_error = (z.z - cfg.stabilizer->lin.z_star.z).norm();
                const Vec2 u = feedback(z, cfg.stabilizer->lin, cfg.stabilizer->gain);
                if (u != Vec2::Zero()) {
                    rec.u = u;
                    cmd.I += u.x();
                    cmd.r += u.y();
                }
            }
            rec.rod_exceeded = !(std::abs(cmd.r) < 0.5 * p.ell);
            if (rec.rod_exceeded && cfg.rod_policy == RodPolicy::Strict) {
                rec.cmd = cmd;
                log.records.push_back(rec);
                throw Error(ErrorKind::RodExceeded, "impulse offset lies off the stick at k = " + std::to_string(kk));
            }

            const FullState plus = impulsive_update(s, cmd.I, cmd.r, p);
            FullState next = advance(s, k, cmd.I, cmd.r, spec, p, &cmd.delta);
            rec.cmd = cmd;
            log.records.push_back(rec);

            if (cfg.sample_dt > 0.0) {
                for (const auto& smp : sample_flight(plus, cmd.delta, cfg.sample_dt, p)) {
                    // the endpoint is emitted as the next flight's first sample
                    if (kk < cfg.k_max && smp.t == cmd.delta) continue;
                    log.trajectory.push_back({t + smp.t, smp.state.h.x(), smp.state.h.y(), smp.state.theta});
                }
            }
            if (kk < cfg.k_max) t += cmd.delta;
            s = next;
        }
    } catch (const Error& e) {
        log.termination = Termination::Error;
        log.error_kind = e.kind();
        log.message = e.what();
    } catch (const std::exception& e) {
        log.termination = Termination::Error;
        log.message = e.what();
    }
    log.duration = log.records.empty() ? 0.0 : log.records.back().t;
    return log;
}

struct EpisodeMetrics {
    /// rho_{k+1} / rho_k per component, skipping components below 1e-12.
    std::vector<double> rho_ratio_x;
    std::vector<double> rho_ratio_y;
    /// |omega_{k+2} / omega_k| at odd k.
    std::vector<double> omega_two_step_ratio;
    double terminal_error = 0.0;
    long impulse_count = 0;
    long rod_exceeded_count = 0;
    long feedback_count = 0;
    std::optional<long> last_feedback_k;
    bool terminated_by_error = false;
    double duration = 0.0;
};

inline EpisodeMetrics metrics(const EpisodeLog& log) {
    if (log.records.empty()) throw Error(ErrorKind::EmptyLog, "metrics: log has no records");
    EpisodeMetrics m;
    const auto& rs = log.records;
    m.impulse_count = static_cast<long>(rs.size());
    m.duration = log.duration;
    m.terminated_by_error = log.termination == Termination::Error;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
        const Vec2& a = rs[i].res.rho;
        const Vec2& b = rs[i + 1].res.rho;
        if (std::abs(a.x()) > 1e-12) m.rho_ratio_x.push_back(b.x() / a.x());
        if (std::abs(a.y()) > 1e-12) m.rho_ratio_y.push_back(b.y() / a.y());
    }
    for (std::size_t i = 0; i + 2 < rs.size(); ++i)
        if (rs[i].k % 2 == 1) m.omega_two_step_ratio.push_back(std::abs(rs[i + 2].pre.omega / rs[i].pre.omega));
    for (const auto& r : rs) {
        if (r.rod_exceeded) ++m.rod_exceeded_count;
        if (r.u) {
            ++m.feedback_count;
            m.last_feedback_k = r.k;
        }
    }
    if (log.fixed_point) {
        for (auto it = rs.rbegin(); it != rs.rend(); ++it) {
            if (it->k % 2 == 1) {
                Vec5 z;
                z << it->pre.h.x(), it->pre.h.y(), it->pre.v.x(), it->pre.v.y(), it->pre.omega;
                m.terminal_error = (z - log.fixed_point->z.z).norm();
                break;
            }
        }
    } else {
        const auto& last = rs.back().res;
        m.terminal_error = std::max(last.rho.norm(), last.drho.norm());
    }
    return m;
}

}  // namespace devilstick
