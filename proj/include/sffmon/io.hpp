#pragma once

// Output plumbing: curve/feature/observable CSVs, FNV-1a file checksums for
// the run manifest, and a small SVG line-chart emitter. CSV is the data
// contract; plots are a convenience layer over it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "sffmon/averaging.hpp"
#include "sffmon/errors.hpp"
#include "sffmon/features.hpp"

namespace sffmon {

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path + " for checksumming");
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    return h;
}

namespace detail_io {

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace detail_io

inline void write_curve_csv(const SffCurve& curve, const std::string& path) {
    curve.validate();
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "# variant=" << to_string(curve.meta.variant) << "\n"
        << "# gamma=" << detail_io::format_double(curve.meta.gamma) << "\n"
        << "# eta=" << detail_io::format_double(curve.meta.eta) << "\n"
        << "# beta=" << detail_io::format_double(curve.meta.beta) << "\n"
        << "# n_disorder=" << curve.meta.n_disorder << "\n"
        << "# n_trajectories=" << curve.meta.n_trajectories << "\n"
        << "# mode=" << to_string(curve.meta.mode) << "\n"
        << "# master_seed=" << curve.meta.master_seed << "\n"
        << "t,value,stderr\n";
    for (std::size_t k = 0; k < curve.grid.size(); ++k)
        out << detail_io::format_double(curve.grid[k]) << ','
            << detail_io::format_double(curve.values[k]) << ','
            << detail_io::format_double(curve.stderrs[k]) << '\n';
}

/// Reads back a curve CSV (metadata comments are skipped; enough for tests
/// and re-plotting, not a full round trip of meta).
inline SffCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    SffCurve curve;
    std::string line;
    long long line_no = 0;
    std::vector<double> ts;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        double cols[3] = {0, 0, 0};
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(row, cell, ','))
                throw ParseError("short row in " + path + " line " + std::to_string(line_no),
                                 line_no);
            try {
                cols[c] = std::stod(cell);
            } catch (const std::exception&) {
                throw ParseError("bad number in " + path + " line " + std::to_string(line_no),
                                 line_no);
            }
        }
        ts.push_back(cols[0]);
        curve.values.push_back(cols[1]);
        curve.stderrs.push_back(cols[2]);
    }
    curve.grid = TimeGrid::from_points(std::move(ts));
    curve.validate();
    return curve;
}

struct FeatureRow {
    double parameter = 0.0;
    RampFeatures features;
    std::size_t n_traj = 1;
    std::size_t n_disorder = 1;
    std::uint64_t seed = 0;
};

inline void write_features_csv(const std::vector<FeatureRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "parameter,t_dip,t_plateau,ratio,plateau_value,n_traj,n_disorder,seed\n";
    for (const auto& r : rows)
        out << detail_io::format_double(r.parameter) << ','
            << detail_io::format_double(r.features.t_dip) << ','
            << detail_io::format_double(r.features.t_plateau) << ','
            << detail_io::format_double(r.features.ratio) << ','
            << detail_io::format_double(r.features.plateau_value) << ',' << r.n_traj << ','
            << r.n_disorder << ',' << r.seed << '\n';
}

struct ObservableRow {
    double t = 0.0;
    double mean_energy = 0.0;
    double variance = 0.0;
    double purity = 0.0;
    std::string trajectory_id;
};

inline void write_observables_csv(const std::vector<ObservableRow>& rows,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "t,mean_energy,variance,purity,trajectory_id\n";
    for (const auto& r : rows)
        out << detail_io::format_double(r.t) << ',' << detail_io::format_double(r.mean_energy)
            << ',' << detail_io::format_double(r.variance) << ','
            << detail_io::format_double(r.purity) << ',' << r.trajectory_id << '\n';
}

inline void write_path_csv(const WienerPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot open " + file + " for writing");
    out << "t,W\n";
    for (std::size_t k = 0; k < path.size(); ++k)
        out << detail_io::format_double(path.grid[k]) << ','
            << detail_io::format_double(path.values[k]) << '\n';
}

// ---------------------------------------------------------------------------
// SVG line charts (log axes as requested per chart).

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgOptions {
    std::string title;
    bool log_x = true;
    bool log_y = true;
    int width = 720;
    int height = 480;
};

inline void write_svg_chart(const std::vector<SvgSeries>& series, const SvgOptions& opt,
                            const std::string& path) {
    if (series.empty()) throw ValidationError("svg chart needs at least one series");
    const double margin = 56.0;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    auto tx = [&](double x) { return opt.log_x ? std::log10(std::max(x, 1e-300)) : x; };
    auto ty = [&](double y) { return opt.log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (opt.log_y && s.y[k] <= 0.0) continue;
            if (opt.log_x && s.x[k] <= 0.0) continue;
            x_lo = std::min(x_lo, tx(s.x[k]));
            x_hi = std::max(x_hi, tx(s.x[k]));
            y_lo = std::min(y_lo, ty(s.y[k]));
            y_hi = std::max(y_hi, ty(s.y[k]));
        }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    auto px = [&](double x) {
        return margin + (tx(x) - x_lo) / (x_hi - x_lo) * (opt.width - 2.0 * margin);
    };
    auto py = [&](double y) {
        return opt.height - margin - (ty(y) - y_lo) / (y_hi - y_lo) * (opt.height - 2.0 * margin);
    };

    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << opt.title << "</text>\n";
    // axes
    out << "<line x1=\"" << margin << "\" y1=\"" << opt.height - margin << "\" x2=\""
        << opt.width - margin << "\" y2=\"" << opt.height - margin
        << "\" stroke=\"black\"/>\n<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
        << margin << "\" y2=\"" << opt.height - margin << "\" stroke=\"black\"/>\n";
    auto axis_label = [&](double v, bool log_axis) {
        std::ostringstream os;
        os << std::setprecision(3) << (log_axis ? std::pow(10.0, v) : v);
        return os.str();
    };
    out << "<text x=\"" << margin << "\" y=\"" << opt.height - margin + 18
        << "\" font-size=\"11\">" << axis_label(x_lo, opt.log_x) << "</text>\n"
        << "<text x=\"" << opt.width - margin << "\" y=\"" << opt.height - margin + 18
        << "\" text-anchor=\"end\" font-size=\"11\">" << axis_label(x_hi, opt.log_x)
        << "</text>\n"
        << "<text x=\"" << margin - 6 << "\" y=\"" << opt.height - margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << axis_label(y_lo, opt.log_y)
        << "</text>\n"
        << "<text x=\"" << margin - 6 << "\" y=\"" << margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << axis_label(y_hi, opt.log_y)
        << "</text>\n";
    int legend_row = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if ((opt.log_y && s.y[k] <= 0.0) || (opt.log_x && s.x[k] <= 0.0)) continue;
            out << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << opt.width - margin - 4 << "\" y=\""
            << margin + 16 * legend_row++ << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
            << s.color << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

inline const std::vector<std::string>& svg_palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#7f7f7f", "#17becf"};
    return colors;
}

} // namespace sffmon
