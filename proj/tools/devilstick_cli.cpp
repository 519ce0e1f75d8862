// devilstick: simulate, analyze and linearize devil-stick juggling scenarios.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "devilstick/devilstick.hpp"

namespace fs = std::filesystem;
using namespace devilstick;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitEpisodeError = 2;

struct JobResult {
    int code = kExitOk;
    std::string out;
    std::string err;
};

JobResult simulate_one(const std::string& path, const fs::path& out_dir) {
    JobResult res;
    Scenario sc;
    EpisodeConfig cfg;
    try {
        sc = load_scenario(path);
        cfg = sc.episode_config();
    } catch (const std::exception& e) {
        res.code = kExitInvalid;
        res.err = std::string("error: ") + e.what() + "\n";
        return res;
    }

    const EpisodeLog log = run_episode(sc.initial, sc.spec, sc.params, cfg);
    const fs::path dir = out_dir.empty() ? fs::path(sc.output_dir.empty() ? "." : sc.output_dir) : out_dir;
    try {
        fs::create_directories(dir);
        write_file(dir / (sc.name + "_impulses.csv"), impulse_csv(log));
        write_file(dir / (sc.name + "_trajectory.csv"), trajectory_csv(log));
        write_file(dir / (sc.name + "_summary.json"), summary_json(sc.name, log).dump(2) + "\n");
    } catch (const std::exception& e) {
        res.code = kExitInvalid;
        res.err = std::string("error: ") + e.what() + "\n";
        return res;
    }

    std::ostringstream os;
    os << sc.name << ": " << log.records.size() << " impulses, duration " << std::fixed << std::setprecision(4)
       << log.duration << " s";
    if (!log.records.empty()) {
        const auto& last = log.records.back();
        os << ", final omega " << last.pre.omega << ", I " << last.cmd.I << ", r " << last.cmd.r;
    }
    os << "\n";
    for (const auto& r : log.records)
        if (r.rod_exceeded) os << "warning: k = " << r.k << ": impulse offset " << r.cmd.r << " m lies off the stick\n";
    res.out = os.str();
    if (log.termination == Termination::Error) {
        res.code = kExitEpisodeError;
        res.err = sc.name + ": episode terminated: " + log.message + "\n";
    }
    return res;
}

int cmd_simulate(const std::vector<std::string>& scenarios, const fs::path& out_dir, int jobs) {
    std::vector<JobResult> results(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) results[i] = simulate_one(scenarios[i], out_dir);
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kExitOk;
    for (const auto& r : results) {
        std::cout << r.out;
        std::cerr << r.err;
        code = std::max(code, r.code);
    }
    return code;
}

void print_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& M) {
    os << name << " =\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        os << "  ";
        for (Eigen::Index j = 0; j < M.cols(); ++j) os << std::setw(11) << std::fixed << std::setprecision(4) << M(i, j);
        os << "\n";
    }
}

int cmd_analyze(const std::string& path, std::vector<double> sweep) {
    const Scenario sc = load_scenario(path);
    const JuggleSpec& spec = sc.spec;
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "theta_odd = " << spec.theta_odd << " rad, theta_even = " << spec.theta_even
              << " rad, delta_theta* = " << spec.delta_theta_star() << " rad\n";
    std::cout << "symmetric: " << (spec.symmetric() ? "yes" : "no") << ", growth factor: " << growth_factor(spec) << "\n";
    if (!spec.symmetric()) {
        std::cout << "no orbit: orientations are not symmetric about the vertical, omega grows by "
                  << growth_factor(spec) << " every two impulses\n";
        return kExitOk;
    }
    if (sweep.empty()) sweep = {-2.0, -3.1596, -4.1888};
    std::cout << "symmetric-juggling omega* = " << symmetric_omega_star(spec, sc.params) << " rad/s\n";
    std::cout << std::setw(10) << "omega*" << std::setw(11) << "omega_even" << std::setw(10) << "delta_odd"
              << std::setw(11) << "delta_even" << std::setw(9) << "I" << std::setw(9) << "r" << "\n";
    for (double w : sweep) {
        try {
            const OrbitSpec o = design_orbit(spec, w, sc.params);
            std::cout << std::setw(10) << w << std::setw(11) << o.omega_even << std::setw(10) << o.delta_odd
                      << std::setw(11) << o.delta_even << std::setw(9) << o.I_mag << std::setw(9) << o.r_star << "\n";
        } catch (const Error& e) {
            std::cout << std::setw(10) << w << "  no orbit (" << e.what() << ")\n";
        }
    }
    return kExitOk;
}

int cmd_linearize(const std::string& path, const fs::path& out_dir) {
    const Scenario sc = load_scenario(path);
    if (!sc.omega_star) throw Error(ErrorKind::Validation, "linearize needs key 'omega_star_radps'");
    const OrbitSpec orbit = design_orbit(sc.spec, *sc.omega_star, sc.params);
    const FixedPoint fp = fixed_point(orbit, sc.params);
    const LinearizedMap lin = linearize(orbit, sc.params, sc.design.fd);
    const ControllabilityResult ctrb = controllability<5, 2>(lin.A, lin.B);
    const SectionGain gain = dlqr<5, 2>(lin.A, lin.B, sc.design.Q, sc.design.R);
    const Mat5 closed = lin.A + lin.B * gain.K;
    Eigen::EigenSolver<Eigen::MatrixXd> es(closed);
    const auto eig = es.eigenvalues();

    std::ostringstream os;
    os << "fd scheme: " << (sc.design.fd.scheme == FdScheme::Central ? "central" : "forward") << ", step "
       << std::scientific << std::setprecision(2) << sc.design.fd.step << "\n";
    print_matrix(os, "z*", fp.z.z.transpose());
    os << "I* = " << std::setprecision(4) << fp.I << ", r* = " << fp.r << "\n";
    print_matrix(os, "A", lin.A);
    print_matrix(os, "B^T", lin.B.transpose());
    os << "controllability rank: " << ctrb.rank << (ctrb.controllable ? " (controllable)" : " (not controllable)") << "\n";
    print_matrix(os, "K", gain.K);
    os << "closed-loop eigenvalues (A + B K):\n";
    for (Eigen::Index i = 0; i < eig.size(); ++i)
        os << "  " << std::setprecision(6) << eig(i).real() << (eig(i).imag() < 0 ? " - " : " + ")
           << std::abs(eig(i).imag()) << "i  |" << std::abs(eig(i)) << "|\n";
    os << "spectral radius: " << spectral_radius(closed) << "\n";
    std::cout << os.str();

    if (!out_dir.empty()) {
        auto rows = [](const Eigen::MatrixXd& M) {
            nlohmann::json j = nlohmann::json::array();
            for (Eigen::Index i = 0; i < M.rows(); ++i) {
                std::vector<double> r(static_cast<std::size_t>(M.cols()));
                for (Eigen::Index c = 0; c < M.cols(); ++c) r[static_cast<std::size_t>(c)] = M(i, c);
                j.push_back(r);
            }
            return j;
        };
        nlohmann::json j;
        j["z_star"] = rows(fp.z.z.transpose());
        j["I_star"] = fp.I;
        j["r_star"] = fp.r;
        j["A"] = rows(lin.A);
        j["B"] = rows(lin.B);
        j["K"] = rows(gain.K);
        j["controllability_rank"] = ctrb.rank;
        j["spectral_radius"] = spectral_radius(closed);
        fs::create_directories(out_dir);
        write_file(out_dir / (sc.name + "_linearization.json"), j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_plot(const std::string& impulses, const std::string& trajectory, const fs::path& out_dir) {
    const fs::path dir = out_dir.empty() ? fs::path(".") : out_dir;
    std::vector<std::pair<fs::path, std::string>> outputs;
    if (!impulses.empty()) {
        const CsvTable t = parse_csv(read_file(impulses));
        outputs.emplace_back(dir / (fs::path(impulses).stem().string() + ".svg"), impulse_figure(t));
    }
    if (!trajectory.empty()) {
        const CsvTable t = parse_csv(read_file(trajectory));
        outputs.emplace_back(dir / (fs::path(trajectory).stem().string() + ".svg"), trajectory_figure(t));
    }
    if (outputs.empty()) throw Error(ErrorKind::InvalidArgument, "plot: give --impulses and/or --trajectory");
    fs::create_directories(dir);
    for (const auto& [p, text] : outputs) {
        write_file(p, text);
        std::cout << "wrote " << p.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Devil-stick juggling with discrete virtual holonomic constraints"};
    app.require_subcommand(1);

    std::vector<std::string> scenarios;
    std::string out_dir;
    int jobs = 1;
    long seed = 0;

    auto* sim = app.add_subcommand("simulate", "run closed-loop episodes and write CSV/JSON logs");
    sim->add_option("--scenario", scenarios, "scenario file (repeatable)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--jobs", jobs, "run scenarios in parallel")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "reserved; the dynamics are deterministic");

    std::string scenario;
    std::vector<double> sweep;
    auto* ana = app.add_subcommand("analyze", "zero-dynamics table over a sweep of omega*");
    ana->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
    ana->add_option("--omega-star", sweep, "omega* values (rad/s)");

    auto* lin = app.add_subcommand("linearize", "return-map Jacobians, controllability and LQR gain");
    lin->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
    lin->add_option("--out", out_dir, "also write <name>_linearization.json here");

    std::string impulses, trajectory;
    auto* plot = app.add_subcommand("plot", "SVG figures from simulate's CSV output");
    plot->add_option("--impulses", impulses, "per-impulse CSV")->check(CLI::ExistingFile);
    plot->add_option("--trajectory", trajectory, "trajectory CSV")->check(CLI::ExistingFile);
    plot->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(scenarios, out_dir, jobs);
        if (*ana) return cmd_analyze(scenario, sweep);
        if (*lin) return cmd_linearize(scenario, out_dir);
        if (*plot) return cmd_plot(impulses, trajectory, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
