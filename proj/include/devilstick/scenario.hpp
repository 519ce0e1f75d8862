#pragma once

// Scenario files: one `key = value` per line, '#' starts a comment.  Angles
// may be written as pi expressions (pi/6, 5*pi/6, -pi/3).  Unknown keys and
// duplicate keys are rejected.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "devilstick/harness.hpp"

namespace devilstick {

struct Scenario {
    std::string name = "scenario";
    StickParams params;
    JuggleSpec spec;
    std::optional<double> omega_star;
    bool stabilizer = false;
    StabilizerDesign design;  // omega_star mirrored here when set
    FullState initial;
    long k_max = 20;
    RodPolicy rod_policy = RodPolicy::Strict;
    double sample_dt = 0.01;
    std::string output_dir;

    EpisodeConfig episode_config() const {
        EpisodeConfig cfg;
        cfg.k_max = k_max;
        cfg.rod_policy = rod_policy;
        cfg.sample_dt = sample_dt;
        if (stabilizer) cfg.stabilizer = make_stabilizer(spec, params, design);
        return cfg;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_plain_number(const std::string& s) {
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return x;
}

/// A number, or [c*]pi[/d] with optional sign.
inline std::optional<double> parse_real(const std::string& text) {
    const std::string s = trim(text);
    if (auto x = parse_plain_number(s)) return x;
    static const std::regex pi_expr(R"(^([+-])?\s*(?:([0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, pi_expr)) return std::nullopt;
    double v = std::numbers::pi;
    if (m[2].matched) {
        auto c = parse_plain_number(m[2].str());
        if (!c) return std::nullopt;
        v *= *c;
    }
    if (m[3].matched) {
        auto d = parse_plain_number(m[3].str());
        if (!d || *d == 0.0) return std::nullopt;
        v /= *d;
    }
    if (m[1].matched && m[1].str() == "-") v = -v;
    return v;
}

struct Entry {
    std::string value;
    int line = 0;
};

}  // namespace detail

inline const std::vector<std::string>& scenario_keys() {
    static const std::vector<std::string> keys = {
        "name",          "mass_kg",        "length_m",        "inertia_kgm2",   "gravity_mps2",
        "theta_odd_rad", "theta_even_rad", "alpha_m",         "beta_m",         "lambda_x",
        "lambda_y",      "init_hx_m",      "init_hy_m",       "init_theta_rad", "init_vx_mps",
        "init_vy_mps",   "init_omega_radps", "omega_star_radps", "stabilizer",  "deadband",
        "lqr_q_diag",    "lqr_r_diag",     "fd_scheme",       "fd_step",        "k_max",
        "r_policy",      "sample_dt_s",    "output_dir",
    };
    return keys;
}

inline Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>") {
    const std::set<std::string> known(scenario_keys().begin(), scenario_keys().end());
    std::map<std::string, detail::Entry> entries;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": expected `key = value`");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key))
            throw Error(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (entries.count(key))
            throw Error(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        if (value.empty())
            throw Error(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
        entries[key] = {value, lineno};
    }

    auto where = [&](const std::string& key) {
        return origin + ":" + std::to_string(entries.at(key).line) + ": key '" + key + "'";
    };
    auto real = [&](const std::string& key) -> std::optional<double> {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        auto v = detail::parse_real(it->second.value);
        if (!v) throw Error(ErrorKind::Parse, where(key) + ": not a number: '" + it->second.value + "'");
        return v;
    };
    auto required = [&](const std::string& key) {
        auto v = real(key);
        if (!v) throw Error(ErrorKind::Validation, origin + ": missing required key '" + key + "'");
        return *v;
    };
    auto word = [&](const std::string& key, const std::string& fallback) {
        auto it = entries.find(key);
        return it == entries.end() ? fallback : it->second.value;
    };
    auto reals = [&](const std::string& key, std::size_t n) -> std::optional<std::vector<double>> {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        std::istringstream vs(it->second.value);
        std::vector<double> out;
        std::string tok;
        while (vs >> tok) {
            auto v = detail::parse_real(tok);
            if (!v) throw Error(ErrorKind::Parse, where(key) + ": not a number: '" + tok + "'");
            out.push_back(*v);
        }
        if (out.size() != n)
            throw Error(ErrorKind::Parse, where(key) + ": expected " + std::to_string(n) + " values");
        return out;
    };

    Scenario sc;
    sc.name = word("name", origin == "<scenario>" ? "scenario" : std::filesystem::path(origin).stem().string());
    sc.params.m = required("mass_kg");
    sc.params.ell = required("length_m");
    sc.params.g = real("gravity_mps2").value_or(9.81);
    sc.params.J = real("inertia_kgm2").value_or(sc.params.m * sc.params.ell * sc.params.ell / 12.0);

    sc.spec.theta_odd = required("theta_odd_rad");
    sc.spec.theta_even = required("theta_even_rad");
    sc.spec.alpha = required("alpha_m");
    sc.spec.beta = required("beta_m");
    sc.spec.lambda_x = required("lambda_x");
    sc.spec.lambda_y = required("lambda_y");

    sc.initial.h = Vec2(required("init_hx_m"), required("init_hy_m"));
    sc.initial.theta = required("init_theta_rad");
    sc.initial.v = Vec2(required("init_vx_mps"), required("init_vy_mps"));
    sc.initial.omega = required("init_omega_radps");

    const ValidationReport rep = validate(sc.spec, sc.params);
    if (!rep.ok()) throw Error(ErrorKind::Validation, origin + ": " + rep.summary());

    if (entries.count("omega_star_radps")) {
        if (entries.at("omega_star_radps").value == "symmetric") {
            if (!sc.spec.symmetric())
                throw Error(ErrorKind::Validation, where("omega_star_radps") + ": 'symmetric' needs symmetric orientations");
            sc.omega_star = symmetric_omega_star(sc.spec, sc.params);
        } else {
            sc.omega_star = real("omega_star_radps");
        }
    }

    const std::string stab = word("stabilizer", "off");
    if (stab == "on" || stab == "true") sc.stabilizer = true;
    else if (stab == "off" || stab == "false") sc.stabilizer = false;
    else throw Error(ErrorKind::Parse, where("stabilizer") + ": expected on/off");
    if (sc.stabilizer && !sc.omega_star)
        throw Error(ErrorKind::Validation, origin + ": stabilizer = on requires key 'omega_star_radps'");

    sc.design.omega_star = sc.omega_star.value_or(0.0);
    sc.design.deadband = real("deadband").value_or(1e-3);
    if (!(sc.design.deadband >= 0.0)) throw Error(ErrorKind::Validation, where("deadband") + ": must be >= 0");
    if (auto q = reals("lqr_q_diag", 5)) {
        sc.design.Q = Mat5::Zero();
        for (int i = 0; i < 5; ++i) sc.design.Q(i, i) = (*q)[static_cast<std::size_t>(i)];
    }
    if (auto r = reals("lqr_r_diag", 2)) {
        sc.design.R = Eigen::Matrix2d::Zero();
        for (int i = 0; i < 2; ++i) sc.design.R(i, i) = (*r)[static_cast<std::size_t>(i)];
        if (!(sc.design.R(0, 0) > 0.0 && sc.design.R(1, 1) > 0.0))
            throw Error(ErrorKind::Validation, where("lqr_r_diag") + ": must be positive");
    }
    const std::string scheme = word("fd_scheme", "central");
    if (scheme == "central") sc.design.fd.scheme = FdScheme::Central;
    else if (scheme == "forward") sc.design.fd.scheme = FdScheme::Forward;
    else throw Error(ErrorKind::Parse, where("fd_scheme") + ": expected central/forward");
    sc.design.fd.step = real("fd_step").value_or(sc.design.fd.scheme == FdScheme::Central ? 1e-6 : 2e-3);
    if (!(sc.design.fd.step > 0.0)) throw Error(ErrorKind::Validation, where("fd_step") + ": must be > 0");

    if (auto k = real("k_max")) {
        if (!(*k >= 1.0) || *k != std::floor(*k))
            throw Error(ErrorKind::Validation, where("k_max") + ": must be an integer >= 1");
        sc.k_max = static_cast<long>(*k);
    }
    const std::string policy = word("r_policy", "strict");
    if (policy == "strict") sc.rod_policy = RodPolicy::Strict;
    else if (policy == "warn") sc.rod_policy = RodPolicy::Warn;
    else throw Error(ErrorKind::Parse, where("r_policy") + ": expected strict/warn");
    sc.sample_dt = real("sample_dt_s").value_or(0.01);
    if (!(sc.sample_dt > 0.0)) throw Error(ErrorKind::Validation, where("sample_dt_s") + ": must be > 0");
    sc.output_dir = word("output_dir", "");
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot read scenario file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

}  // namespace devilstick
