#include "driftmeter/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftmeter/errors.hpp"

namespace driftmeter {

namespace fs = std::filesystem;

std::vector<PlotKind> parse_plot_kinds(const std::string& csv) {
    std::vector<PlotKind> kinds;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "track")
            kinds.push_back(PlotKind::track);
        else if (item == "histogram")
            kinds.push_back(PlotKind::histogram);
        else if (item == "fit")
            kinds.push_back(PlotKind::fit);
        else if (item == "scatter")
            kinds.push_back(PlotKind::scatter);
        else if (item == "clusters")
            kinds.push_back(PlotKind::clusters);
        else
            throw ArgumentError("plot: unknown plot kind '" + item + "'");
    }
    return kinds;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#bcbd22"};

std::string fmt(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Bounds {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
};

Bounds data_bounds(const Figure& fig) {
    Bounds b;
    b.x_min = b.y_min = std::numeric_limits<double>::infinity();
    b.x_max = b.y_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : fig.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            b.x_min = std::min(b.x_min, s.x[i]);
            b.x_max = std::max(b.x_max, s.x[i]);
            b.y_min = std::min(b.y_min, s.y[i]);
            b.y_max = std::max(b.y_max, s.y[i]);
        }
        if (s.kind == Series::Kind::bars) b.y_min = std::min(b.y_min, 0.0);
    }
    if (!std::isfinite(b.x_min)) b = Bounds{};
    if (b.x_max == b.x_min) {
        b.x_min -= 1;
        b.x_max += 1;
    }
    if (b.y_max == b.y_min) {
        b.y_min -= 1;
        b.y_max += 1;
    }
    const double xpad = 0.04 * (b.x_max - b.x_min);
    const double ypad = 0.06 * (b.y_max - b.y_min);
    b.x_min -= xpad;
    b.x_max += xpad;
    b.y_min -= ypad;
    b.y_max += ypad;
    return b;
}

// 1/2/5 x 10^k step giving a handful of ticks
double nice_step(double span) {
    const double rough = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(rough)));
    for (double m : {1.0, 2.0, 5.0})
        if (rough <= m * mag) return m * mag;
    return 10.0 * mag;
}

struct Mapper {
    Bounds b;
    double px0, px1, py0, py1; // pixel viewport (py0 = top)

    double x(double v) const { return px0 + (v - b.x_min) / (b.x_max - b.x_min) * (px1 - px0); }
    double y(double v) const { return py1 - (v - b.y_min) / (b.y_max - b.y_min) * (py1 - py0); }
};

} // namespace

void render_svg(const Figure& fig, std::ostream& out, int width, int height) {
    const Bounds b = data_bounds(fig);
    const Mapper m{b, 70.0, width - 25.0, 42.0, height - 52.0};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
        << "font-family=\"sans-serif\">" << xml_escape(fig.title) << "</text>\n";

    // grid and ticks
    const double xs = nice_step(b.x_max - b.x_min);
    const double ys = nice_step(b.y_max - b.y_min);
    out << "<g font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">\n";
    for (double t = std::ceil(b.x_min / xs) * xs; t <= b.x_max + 1e-12 * xs; t += xs) {
        const double px = m.x(t);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(m.py0) << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << fmt(m.py1) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(m.py1 + 16)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t = std::ceil(b.y_min / ys) * ys; t <= b.y_max + 1e-12 * ys; t += ys) {
        const double py = m.y(t);
        out << "<line x1=\"" << fmt(m.px0) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(m.px1)
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(m.px0 - 6) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "</g>\n";

    // axes
    out << "<rect x=\"" << fmt(m.px0) << "\" y=\"" << fmt(m.py0) << "\" width=\""
        << fmt(m.px1 - m.px0) << "\" height=\"" << fmt(m.py1 - m.py0)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(0.5 * (m.px0 + m.px1)) << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << xml_escape(fig.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << fmt(0.5 * (m.py0 + m.py1))
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << fmt(0.5 * (m.py0 + m.py1)) << ")\">"
        << xml_escape(fig.y_label) << "</text>\n";

    // series
    for (const auto& s : fig.series) {
        if (s.kind == Series::Kind::bars) {
            // bar width from the smallest spacing between consecutive x values
            double w = (b.x_max - b.x_min) / std::max<std::size_t>(s.x.size(), 1);
            for (std::size_t i = 1; i < s.x.size(); ++i)
                w = std::min(w, std::abs(s.x[i] - s.x[i - 1]));
            const double half_px = 0.5 * w / (b.x_max - b.x_min) * (m.px1 - m.px0);
            out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.55\" class=\"series\" "
                << "data-name=\"" << xml_escape(s.name) << "\">\n";
            const double base = m.y(std::max(0.0, b.y_min));
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                const double px = m.x(s.x[i]);
                const double py = m.y(s.y[i]);
                out << "<rect x=\"" << fmt(px - half_px) << "\" y=\"" << fmt(std::min(py, base))
                    << "\" width=\"" << fmt(2 * half_px) << "\" height=\""
                    << fmt(std::abs(base - py)) << "\"/>\n";
            }
            out << "</g>\n";
        } else if (s.kind == Series::Kind::points) {
            out << "<g fill=\"" << s.color << "\" stroke=\"" << s.color
                << "\" class=\"series\" data-name=\"" << xml_escape(s.name) << "\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                const double px = m.x(s.x[i]);
                const double py = m.y(s.y[i]);
                if (s.name == "noise") { // distinct marker for unclustered points
                    out << "<path d=\"M" << fmt(px - 3.2) << " " << fmt(py - 3.2) << " L"
                        << fmt(px + 3.2) << " " << fmt(py + 3.2) << " M" << fmt(px - 3.2) << " "
                        << fmt(py + 3.2) << " L" << fmt(px + 3.2) << " " << fmt(py - 3.2)
                        << "\" stroke-width=\"1.6\" fill=\"none\"/>\n";
                } else {
                    out << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
                        << "\" r=\"2.6\"/>\n";
                }
            }
            out << "</g>\n";
        } else {
            // polyline, broken at non-finite entries
            out << "<g fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.4\" class=\"series\" data-name=\"" << xml_escape(s.name)
                << "\">\n";
            std::string pts;
            auto flush = [&] {
                if (!pts.empty()) out << "<polyline points=\"" << pts << "\"/>\n";
                pts.clear();
            };
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    flush();
                    continue;
                }
                pts += fmt(m.x(s.x[i]));
                pts.push_back(',');
                pts += fmt(m.y(s.y[i]));
                pts.push_back(' ');
            }
            flush();
            out << "</g>\n";
        }
    }
    out << "</svg>\n";
}

Figure make_track_figure(const RunArtifacts& art) {
    Figure fig;
    fig.title = "Fundamental frequency track";
    fig.x_label = "time (s)";
    fig.y_label = "f0 (Hz)";
    Series s;
    s.name = "f0";
    s.kind = Series::Kind::line;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& f : art.track.frames) {
        s.x.push_back(f.time_sec);
        s.y.push_back(f.voiced ? f.f0_hz : nan);
    }
    fig.series.push_back(std::move(s));
    return fig;
}

Figure make_histogram_figure(const RunArtifacts& art) {
    Figure fig;
    fig.title = "Pitch histogram";
    fig.x_label = "pitch (cents)";
    fig.y_label = "frames";
    Series raw;
    raw.name = "raw";
    raw.kind = Series::Kind::bars;
    for (std::size_t i = 0; i < art.global_raw.size(); ++i) {
        raw.x.push_back(art.global_raw.bin_center(i));
        raw.y.push_back(art.global_raw.counts[i]);
    }
    Series smooth;
    smooth.name = "smoothed";
    smooth.kind = Series::Kind::line;
    smooth.color = "#d62728";
    for (std::size_t i = 0; i < art.global_smoothed.size(); ++i) {
        smooth.x.push_back(art.global_smoothed.bin_center(i));
        smooth.y.push_back(art.global_smoothed.counts[i]);
    }
    fig.series.push_back(std::move(raw));
    fig.series.push_back(std::move(smooth));
    return fig;
}

Figure make_fit_figure(const RunArtifacts& art) {
    if (art.global_fits.empty())
        throw AnalysisError("plot: no fitted mountain available for the fit figure");
    const auto& [mountain, fit] = art.global_fits.front();

    Figure fig;
    fig.title = "Peak fit, first mountain";
    fig.x_label = "pitch (cents)";
    fig.y_label = "frames";

    const Histogram& h = art.global_raw;
    Series bins;
    bins.name = "bins";
    bins.kind = Series::Kind::points;
    for (int bnum = mountain.lo_bin; bnum <= mountain.hi_bin; ++bnum) {
        bins.x.push_back(h.bin_center(static_cast<std::size_t>(bnum)));
        bins.y.push_back(h.counts[static_cast<std::size_t>(bnum)]);
    }

    Series curve;
    curve.name = "fit";
    curve.kind = Series::Kind::line;
    curve.color = "#d62728";
    const double lo = fit.lo_cents, hi = fit.hi_cents;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        curve.x.push_back(x);
        curve.y.push_back(fit.eval(x));
    }
    fig.series.push_back(std::move(bins));
    fig.series.push_back(std::move(curve));
    return fig;
}

Figure make_scatter_figure(const RunArtifacts& art) {
    Figure fig;
    fig.title = "Detected peak frequencies per sentence";
    fig.x_label = "sentence";
    fig.y_label = "pitch (cents)";
    Series s;
    s.name = "peaks";
    s.kind = Series::Kind::points;
    for (const auto& p : art.report.points) {
        s.x.push_back(p.sentence_index);
        s.y.push_back(p.cents);
    }
    fig.series.push_back(std::move(s));
    return fig;
}

Figure make_clusters_figure(const RunArtifacts& art) {
    Figure fig;
    fig.title = "Clustered peaks with drift lines";
    fig.x_label = "sentence";
    fig.y_label = "pitch (cents)";

    for (const auto& [cluster, line] : art.report.clusters) {
        Series pts;
        pts.name = "cluster " + std::to_string(cluster.id);
        pts.kind = Series::Kind::points;
        pts.color = kPalette[cluster.id % (sizeof kPalette / sizeof kPalette[0])];
        for (const auto& p : cluster.points) {
            pts.x.push_back(p.sentence_index);
            pts.y.push_back(p.cents);
        }
        fig.series.push_back(std::move(pts));

        if (line) {
            int x_lo = cluster.points.front().sentence_index;
            int x_hi = x_lo;
            for (const auto& p : cluster.points) {
                x_lo = std::min(x_lo, p.sentence_index);
                x_hi = std::max(x_hi, p.sentence_index);
            }
            Series l;
            l.name = "line " + std::to_string(cluster.id);
            l.kind = Series::Kind::line;
            l.color = fig.series.back().color;
            l.x = {static_cast<double>(x_lo), static_cast<double>(x_hi)};
            l.y = {line->intercept + line->slope * x_lo, line->intercept + line->slope * x_hi};
            fig.series.push_back(std::move(l));
        }
    }

    Series noise;
    noise.name = "noise";
    noise.kind = Series::Kind::points;
    noise.color = "#777777";
    for (const auto& p : art.report.noise) {
        noise.x.push_back(p.sentence_index);
        noise.y.push_back(p.cents);
    }
    if (!noise.x.empty()) fig.series.push_back(std::move(noise));
    return fig;
}

std::vector<std::string> emit_plots(const RunArtifacts& art, const std::vector<PlotKind>& which,
                                    const std::string& out_dir) {
    std::vector<std::string> manifest;
    std::error_code ec;
    if (!which.empty()) {
        fs::create_directories(out_dir, ec);
        if (ec) throw InputError("plot: cannot create output directory " + out_dir);
    }
    for (PlotKind kind : which) {
        Figure fig;
        std::string name;
        switch (kind) {
            case PlotKind::track: fig = make_track_figure(art); name = "track.svg"; break;
            case PlotKind::histogram:
                fig = make_histogram_figure(art);
                name = "histogram.svg";
                break;
            case PlotKind::fit: fig = make_fit_figure(art); name = "fit.svg"; break;
            case PlotKind::scatter: fig = make_scatter_figure(art); name = "scatter.svg"; break;
            case PlotKind::clusters:
                fig = make_clusters_figure(art);
                name = "clusters.svg";
                break;
        }
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("plot: cannot write " + path.string());
        render_svg(fig, out);
        manifest.push_back(path.string());
    }
    return manifest;
}

} // namespace driftmeter
