#include "driftmeter/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "driftmeter/errors.hpp"

namespace driftmeter {

double hz_to_cents(double f0_hz, const CentsConfig& cfg) {
    if (!(cfg.ref_hz > 0.0)) throw ArgumentError("cents-config: ref_hz must be > 0");
    if (!(f0_hz > 0.0))
        throw ArgumentError("cents-domain: frequency must be > 0, got " + std::to_string(f0_hz));
    return 1200.0 * std::log2(f0_hz / cfg.ref_hz);
}

double cents_to_hz(double cents, const CentsConfig& cfg) {
    if (!(cfg.ref_hz > 0.0)) throw ArgumentError("cents-config: ref_hz must be > 0");
    return cfg.ref_hz * std::exp2(cents / 1200.0);
}

double Histogram::max_count() const {
    double m = 0.0;
    for (double c : counts) m = std::max(m, c);
    return m;
}

Histogram build_histogram(const std::vector<double>& cents_values, double bin_width_cents,
                          std::optional<std::pair<double, double>> range) {
    if (!(bin_width_cents > 0.0)) throw ArgumentError("histogram: bin width must be > 0");
    if (range && !(range->first < range->second))
        throw ArgumentError("histogram: range lo must be < hi");
    if (cents_values.empty() && !range)
        throw AnalysisError("empty-histogram: no values and no explicit range");

    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        auto [mn, mx] = std::minmax_element(cents_values.begin(), cents_values.end());
        lo = *mn;
        hi = *mx;
    }

    Histogram h;
    h.bin_width_cents = bin_width_cents;
    h.origin_cents = std::floor(lo / bin_width_cents) * bin_width_cents;

    const auto n_bins =
        static_cast<std::size_t>(std::floor((hi - h.origin_cents) / bin_width_cents)) + 1;
    h.counts.assign(std::max<std::size_t>(n_bins, 1), 0.0);

    for (double v : cents_values) {
        if (range && (v < lo || v > hi)) continue;
        auto idx = static_cast<long>(std::floor((v - h.origin_cents) / bin_width_cents));
        if (idx < 0 || idx >= static_cast<long>(h.counts.size())) continue; // fp edge guard
        h.counts[static_cast<std::size_t>(idx)] += 1.0;
        ++h.total_frames;
    }
    return h;
}

Histogram smooth_moving_average(const Histogram& h, int window_bins) {
    if (window_bins < 1 || window_bins % 2 == 0)
        throw ArgumentError("histogram: smoothing window must be odd and >= 1");
    if (window_bins == 1) return h;

    Histogram out = h;
    const int n = static_cast<int>(h.counts.size());
    const int half = window_bins / 2;
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - half);
        const int b = std::min(n - 1, i + half);
        double acc = 0.0;
        for (int j = a; j <= b; ++j) acc += h.counts[static_cast<std::size_t>(j)];
        out.counts[static_cast<std::size_t>(i)] = acc / (b - a + 1);
    }
    return out;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
    std::string buf = "# bin_center_cents,count\n";
    char tmp[32];
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        auto [p1, e1] = std::to_chars(tmp, tmp + sizeof tmp, h.bin_center(i));
        (void)e1;
        buf.append(tmp, p1);
        buf.push_back(',');
        auto [p2, e2] = std::to_chars(tmp, tmp + sizeof tmp, h.counts[i]);
        (void)e2;
        buf.append(tmp, p2);
        buf.push_back('\n');
    }
    out << buf;
}

} // namespace driftmeter
