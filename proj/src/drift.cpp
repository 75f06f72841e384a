#include "driftmeter/drift.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <string>

#include "driftmeter/errors.hpp"

namespace driftmeter {

void ClusterConfig::validate() const {
    if (!(eps > 0.0)) throw ArgumentError("cluster-config: eps must be > 0");
    if (min_samples < 1) throw ArgumentError("cluster-config: min_samples must be >= 1");
    if (!(cents_scale > 0.0) || !(index_scale > 0.0))
        throw ArgumentError("cluster-config: scales must be > 0");
    if (min_significant_size < 1)
        throw ArgumentError("cluster-config: min_significant_size must be >= 1");
}

namespace {

constexpr int kUnlabeled = -2;
constexpr int kNoise = -1;

std::vector<int> region_query(const std::vector<PeakPoint>& pts, std::size_t i,
                              const ClusterConfig& cfg) {
    const double eps2 = cfg.eps * cfg.eps;
    const double xi = pts[i].sentence_index / cfg.index_scale;
    const double yi = pts[i].cents / cfg.cents_scale;
    std::vector<int> out;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double dx = cfg.cents_only ? 0.0 : pts[j].sentence_index / cfg.index_scale - xi;
        const double dy = pts[j].cents / cfg.cents_scale - yi;
        if (dx * dx + dy * dy <= eps2) out.push_back(static_cast<int>(j));
    }
    return out; // ascending by construction
}

} // namespace

DbscanResult dbscan(const std::vector<PeakPoint>& points, const ClusterConfig& cfg) {
    cfg.validate();
    for (const auto& p : points)
        if (!std::isfinite(p.cents)) throw ArgumentError("dbscan: non-finite cents value");

    const std::size_t n = points.size();
    std::vector<int> label(n, kUnlabeled);
    int next_cluster = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != kUnlabeled) continue;
        auto neighbors = region_query(points, i, cfg);
        if (static_cast<int>(neighbors.size()) < cfg.min_samples) {
            label[i] = kNoise;
            continue;
        }

        const int cid = next_cluster++;
        label[i] = cid;
        std::deque<int> frontier(neighbors.begin(), neighbors.end());
        while (!frontier.empty()) {
            const int q = frontier.front();
            frontier.pop_front();
            if (label[q] == kNoise) label[q] = cid; // border point claimed
            if (label[q] != kUnlabeled) continue;
            label[q] = cid;
            auto qn = region_query(points, static_cast<std::size_t>(q), cfg);
            if (static_cast<int>(qn.size()) >= cfg.min_samples)
                frontier.insert(frontier.end(), qn.begin(), qn.end());
        }
    }

    DbscanResult res;
    res.clusters.resize(static_cast<std::size_t>(next_cluster));
    for (int c = 0; c < next_cluster; ++c) res.clusters[static_cast<std::size_t>(c)].id = c;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == kNoise)
            res.noise.push_back(points[i]);
        else
            res.clusters[static_cast<std::size_t>(label[i])].points.push_back(points[i]);
    }
    for (auto& c : res.clusters)
        c.significant = static_cast<int>(c.points.size()) >= cfg.min_significant_size;
    return res;
}

DriftLine fit_drift_line(const Cluster& cluster) {
    const auto& pts = cluster.points;
    if (pts.size() < 2) throw AnalysisError("degenerate-regression: need at least 2 points");

    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += p.sentence_index;
        sy += p.cents;
    }
    const double n = static_cast<double>(pts.size());
    const double mx = sx / n, my = sy / n;

    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double dx = p.sentence_index - mx;
        sxx += dx * dx;
        sxy += dx * (p.cents - my);
    }
    if (sxx == 0.0)
        throw AnalysisError("degenerate-regression: all points share one sentence index");

    DriftLine line;
    line.slope = sxy / sxx;
    line.intercept = my - line.slope * mx;

    double ss_res = 0, ss_tot = 0;
    for (const auto& p : pts) {
        const double r = p.cents - (line.intercept + line.slope * p.sentence_index);
        ss_res += r * r;
        const double d = p.cents - my;
        ss_tot += d * d;
    }
    line.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return line;
}

DriftReport analyze_drift(const std::vector<std::pair<Sentence, std::vector<PeakFit>>>& peaks,
                          const ClusterConfig& cfg) {
    cfg.validate();

    DriftReport report;
    report.config = cfg;
    report.n_sentences = static_cast<int>(peaks.size());

    for (const auto& [sentence, fits] : peaks)
        for (const auto& f : fits)
            report.points.push_back({sentence.index, f.peak_cents, f});
    if (report.points.empty())
        throw AnalysisError("empty-report: no peaks detected in any sentence");

    // mean spacing of sentence mid-times, for the per-minute slope conversion
    std::optional<double> spacing_min;
    if (peaks.size() >= 2) {
        auto mid = [](const Sentence& s) { return 0.5 * (s.start_sec + s.end_sec); };
        const double span = mid(peaks.back().first) - mid(peaks.front().first);
        const double per_step = span / static_cast<double>(peaks.size() - 1) / 60.0;
        if (per_step > 0.0) spacing_min = per_step;
    }

    DbscanResult clustering = dbscan(report.points, cfg);
    report.noise = std::move(clustering.noise);

    for (auto& cluster : clustering.clusters) {
        std::optional<DriftLine> line;
        bool distinct_x = false;
        for (std::size_t i = 1; i < cluster.points.size(); ++i)
            if (cluster.points[i].sentence_index != cluster.points[0].sentence_index)
                distinct_x = true;
        if (cluster.points.size() >= 2 && distinct_x) {
            DriftLine l = fit_drift_line(cluster);
            if (spacing_min) l.slope_cents_per_minute = l.slope / *spacing_min;
            line = l;
        }
        if (cluster.significant && line) {
            report.significant_slopes.push_back(line->slope);
        }
        if (cluster.significant) ++report.n_significant_clusters;
        report.clusters.emplace_back(std::move(cluster), line);
    }

    if (!report.significant_slopes.empty()) {
        double acc = 0.0;
        for (double s : report.significant_slopes) acc += s;
        report.mean_slope = acc / static_cast<double>(report.significant_slopes.size());
    }
    return report;
}

void write_clusters_csv(const DriftReport& report, std::ostream& out) {
    std::string buf = "# cluster_id,sentence_index,cents,significant\n";
    char tmp[32];
    auto row = [&](int id, const PeakPoint& p, bool significant) {
        buf += std::to_string(id);
        buf.push_back(',');
        buf += std::to_string(p.sentence_index);
        buf.push_back(',');
        auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, p.cents);
        (void)ec;
        buf.append(tmp, ptr);
        buf.push_back(',');
        buf += significant ? '1' : '0';
        buf.push_back('\n');
    };
    for (const auto& [cluster, line] : report.clusters)
        for (const auto& p : cluster.points) row(cluster.id, p, cluster.significant);
    for (const auto& p : report.noise) row(-1, p, false);
    out << buf;
}

} // namespace driftmeter
