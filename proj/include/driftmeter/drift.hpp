#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "driftmeter/peaks.hpp"

namespace driftmeter {

// One detected note occurrence: (sentence number, peak position).
struct PeakPoint {
    int sentence_index = 0;
    double cents = 0.0;
    PeakFit source;
};

struct ClusterConfig {
    double eps = 1.5;            // neighborhood radius in scaled units
    int min_samples = 2;         // core threshold, neighborhood includes the point itself
    double cents_scale = 25.0;   // cents per unit on the y-axis
    double index_scale = 1.0;    // sentences per unit on the x-axis
    int min_significant_size = 3;
    bool cents_only = false;     // cluster on the cents axis alone

    void validate() const;
};

struct Cluster {
    int id = 0;
    std::vector<PeakPoint> points;
    bool significant = false; // size >= min_significant_size
};

// OLS line through a cluster's (sentence_index, cents) points.
struct DriftLine {
    double slope = 0.0;     // cents per sentence
    double intercept = 0.0; // cents at sentence 0
    double r2 = 0.0;
    std::optional<double> slope_cents_per_minute;
};

struct DriftReport {
    int n_sentences = 0;
    std::vector<PeakPoint> points;
    std::vector<std::pair<Cluster, std::optional<DriftLine>>> clusters;
    std::vector<PeakPoint> noise;
    ClusterConfig config;

    // over significant clusters that carry a regression line
    std::vector<double> significant_slopes;
    std::optional<double> mean_slope;
    int n_significant_clusters = 0;
};

struct DbscanResult {
    std::vector<Cluster> clusters;
    std::vector<PeakPoint> noise;
};

// Standard DBSCAN over (sentence_index / index_scale, cents / cents_scale)
// with a closed eps-neighborhood. Expansion follows ascending point index,
// so border-point ties and cluster ids are deterministic.
DbscanResult dbscan(const std::vector<PeakPoint>& points, const ClusterConfig& cfg = {});

// Closed-form least squares of cents on sentence_index. Throws
// AnalysisError when all points share one sentence index.
DriftLine fit_drift_line(const Cluster& cluster);

// Whole-performance analysis: flatten per-sentence peaks, cluster, regress.
// Clusters that cannot carry a line (single sentence index) are kept but
// unfitted; insignificant clusters are excluded from the summary.
DriftReport analyze_drift(const std::vector<std::pair<Sentence, std::vector<PeakFit>>>& peaks,
                          const ClusterConfig& cfg = {});

// Flat CSV `cluster_id,sentence_index,cents,significant`; noise rows carry
// cluster_id -1.
void write_clusters_csv(const DriftReport& report, std::ostream& out);

} // namespace driftmeter
