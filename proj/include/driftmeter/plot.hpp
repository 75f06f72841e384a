#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "driftmeter/pipeline.hpp"

namespace driftmeter {

enum class PlotKind { track, histogram, fit, scatter, clusters };

// Parses a comma-separated kind list ("track,histogram,..."); unknown names
// raise ArgumentError.
std::vector<PlotKind> parse_plot_kinds(const std::string& csv);

// One plotted data series. x/y are data coordinates; the SVG renderer maps
// them to pixels.
struct Series {
    enum class Kind { line, points, bars };
    std::string name;
    Kind kind = Kind::line;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

// Figure builders, one per plot kind. They are pure views of RunArtifacts:
// every series mirrors a table in the artifacts.
Figure make_track_figure(const RunArtifacts& art);
Figure make_histogram_figure(const RunArtifacts& art);
Figure make_fit_figure(const RunArtifacts& art);    // first fitted mountain of the global histogram
Figure make_scatter_figure(const RunArtifacts& art);
Figure make_clusters_figure(const RunArtifacts& art);

void render_svg(const Figure& fig, std::ostream& out, int width = 880, int height = 520);

// Writes one standalone SVG per requested kind into out_dir and returns the
// paths written.
std::vector<std::string> emit_plots(const RunArtifacts& art, const std::vector<PlotKind>& which,
                                    const std::string& out_dir);

} // namespace driftmeter
