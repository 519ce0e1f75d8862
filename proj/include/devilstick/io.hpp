#pragma once

// CSV logs, JSON summaries and SVG figures for episodes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "devilstick/harness.hpp"

namespace devilstick {

inline constexpr const char* kImpulseCsvHeader = "k,theta,omega,rho_x,rho_y,drho_x,drho_y,delta,I,r,u_I,u_r";
inline constexpr const char* kTrajectoryCsvHeader = "t,hx,hy,theta";

namespace detail {

inline std::ostream& fmt17(std::ostream& os) { return os << std::setprecision(17); }

}  // namespace detail

inline std::string impulse_csv(const EpisodeLog& log) {
    std::ostringstream os;
    detail::fmt17(os);
    os << kImpulseCsvHeader << '\n';
    for (const auto& r : log.records) {
        const Vec2 u = r.u.value_or(Vec2::Zero());
        os << r.k << ',' << r.pre.theta << ',' << r.pre.omega << ',' << r.res.rho.x() << ',' << r.res.rho.y()
           << ',' << r.res.drho.x() << ',' << r.res.drho.y() << ',' << r.cmd.delta << ',' << r.cmd.I << ','
           << r.cmd.r << ',' << u.x() << ',' << u.y() << '\n';
    }
    return os.str();
}

inline std::string trajectory_csv(const EpisodeLog& log) {
    std::ostringstream os;
    detail::fmt17(os);
    os << kTrajectoryCsvHeader << '\n';
    for (const auto& p : log.trajectory) os << p.t << ',' << p.hx << ',' << p.hy << ',' << p.theta << '\n';
    return os.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::Parse, "csv: missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    std::vector<double> values(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
};

/// Parses a numeric CSV with a header line.  A table without data rows is an error.
inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorKind::Parse, "csv line " + std::to_string(lineno) + ": wrong number of fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), x);
            if (ec != std::errc{} || ptr != c.data() + c.size())
                throw Error(ErrorKind::Parse, "csv line " + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(x);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty() || t.rows.empty()) throw Error(ErrorKind::Parse, "csv: no data rows");
    return t;
}

inline nlohmann::json summary_json(const std::string& name, const EpisodeLog& log) {
    nlohmann::json j;
    j["scenario"] = name;
    j["termination"] = log.termination == Termination::Completed ? "completed" : "error";
    if (log.error_kind) j["error_kind"] = std::string(to_string(*log.error_kind));
    if (!log.message.empty()) j["message"] = log.message;
    j["duration_s"] = log.duration;
    if (log.records.empty()) return j;

    const EpisodeMetrics m = metrics(log);
    j["impulse_count"] = m.impulse_count;
    j["terminal_error"] = m.terminal_error;
    j["rho_ratio_x"] = m.rho_ratio_x;
    j["rho_ratio_y"] = m.rho_ratio_y;
    j["omega_two_step_ratio"] = m.omega_two_step_ratio;
    j["rod_exceeded_count"] = m.rod_exceeded_count;
    j["feedback_count"] = m.feedback_count;
    if (m.last_feedback_k) j["last_feedback_k"] = *m.last_feedback_k;
    const auto& last = log.records.back();
    j["final"] = {{"k", last.k}, {"omega", last.pre.omega}, {"delta", last.cmd.delta}, {"I", last.cmd.I},
                  {"r", last.cmd.r}};
    if (log.fixed_point) {
        const auto& z = log.fixed_point->z.z;
        j["fixed_point"] = {{"z", {z(0), z(1), z(2), z(3), z(4)}}, {"I", log.fixed_point->I}, {"r", log.fixed_point->r}};
    }
    return j;
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
    std::string title;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;
};

namespace detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

inline std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

inline void panel(std::ostringstream& os, const Series& s, double x0, double y0, double w, double h,
                  const std::string& xlabel) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
    }
    if (!(xmax > xmin)) { xmin -= 1.0; xmax += 1.0; }
    if (!(ymax - ymin > 1e-12 * std::max(1.0, std::abs(ymax)))) { ymin -= 1.0; ymax += 1.0; }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double ml = 60, mr = 10, mt = 24, mb = 34;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto px = [&](double x) { return x0 + ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return y0 + mt + (ymax - y) / (ymax - ymin) * ph; };

    os << "<g>\n";
    os << "<rect x=\"" << num(x0 + ml) << "\" y=\"" << num(y0 + mt) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << num(x0 + ml + pw / 2) << "\" y=\"" << num(y0 + 16)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << s.title << "</text>\n";
    os << "<text x=\"" << num(x0 + ml + pw / 2) << "\" y=\"" << num(y0 + h - 4)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << xlabel << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << num(x0 + ml - 4) << "\" y=\"" << num(py(yv) + 4)
           << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv) << "</text>\n";
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + mt + ph + 13)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
    }
    if (ymin < 0.0 && ymax > 0.0)
        os << "<line x1=\"" << num(x0 + ml) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(x0 + ml + pw)
           << "\" y2=\"" << num(py(0)) << "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    os << "\"/>\n";
    if (s.markers)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
               << "\" r=\"2.5\" fill=\"#1f5fbf\"/>\n";
    os << "</g>\n";
}

}  // namespace detail

/// Grid of line plots sharing one x label.
inline std::string svg_panels(const std::vector<Series>& series, int columns, const std::string& xlabel,
                              double panel_w = 380, double panel_h = 220) {
    if (series.empty()) throw Error(ErrorKind::InvalidArgument, "svg: nothing to plot");
    for (const auto& s : series)
        if (s.x.empty() || s.x.size() != s.y.size())
            throw Error(ErrorKind::InvalidArgument, "svg: series '" + s.title + "' is empty or ragged");
    const int rows = static_cast<int>((series.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(panel_w * columns) << "\" height=\""
       << detail::num(panel_h * rows) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const int c = static_cast<int>(i) % columns;
        const int r = static_cast<int>(i) / columns;
        detail::panel(os, series[i], c * panel_w, r * panel_h, panel_w, panel_h, xlabel);
    }
    os << "</svg>\n";
    return os.str();
}

/// The eight per-impulse panels: rho, Drho, omega, delta, I, r against k.
inline std::string impulse_figure(const CsvTable& t) {
    const auto k = t.values("k");
    const std::vector<std::pair<const char*, const char*>> cols = {
        {"rho_x", "rho_x (m)"},     {"rho_y", "rho_y (m)"},     {"drho_x", "Drho_x (m/s)"},
        {"drho_y", "Drho_y (m/s)"}, {"omega", "omega_k (rad/s)"}, {"delta", "delta_k (s)"},
        {"I", "I_k (N s)"},         {"r", "r_k (m)"},
    };
    std::vector<Series> series;
    for (const auto& [col, title] : cols) series.push_back({title, k, t.values(col), true});
    return svg_panels(series, 2, "k");
}

inline std::string trajectory_figure(const CsvTable& t) {
    return svg_panels({{"center-of-mass trajectory: h_y (m) vs h_x (m)", t.values("hx"), t.values("hy"), false}}, 1,
                      "h_x (m)", 640, 420);
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace devilstick
