#pragma once

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace driftmeter {

// Reference frequency for 0 cents. C0 by default so vocal pitches are
// always positive.
struct CentsConfig {
    double ref_hz = 16.3516;
};

// cents(f) = 1200 * log2(f / ref). Throws ArgumentError for f <= 0.
double hz_to_cents(double f0_hz, const CentsConfig& cfg = {});
double cents_to_hz(double cents, const CentsConfig& cfg = {});

// Binned pitch counts. Counts are reals so a smoothed histogram is the same
// type; for a raw histogram sum(counts) == total_frames.
struct Histogram {
    double bin_width_cents = 5.0;
    double origin_cents = 0.0; // left edge of bin 0
    std::vector<double> counts;
    long total_frames = 0;

    std::size_t size() const { return counts.size(); }
    double bin_center(std::size_t i) const {
        return origin_cents + (static_cast<double>(i) + 0.5) * bin_width_cents;
    }
    double bin_left(std::size_t i) const {
        return origin_cents + static_cast<double>(i) * bin_width_cents;
    }
    double max_count() const;
};

// Bins values at the given width. The origin is snapped to an integer
// multiple of the width at or below the data minimum (or the range lo).
// Values outside an explicit [lo, hi] range are discarded and not counted.
Histogram build_histogram(const std::vector<double>& cents_values, double bin_width_cents,
                          std::optional<std::pair<double, double>> range = std::nullopt);

// Centered moving average with an odd window; edges shrink the window to
// the bins that exist. Bin geometry is unchanged.
Histogram smooth_moving_average(const Histogram& h, int window_bins);

// `bin_center_cents,count` rows for external plotting.
void write_histogram_csv(const Histogram& h, std::ostream& out);

} // namespace driftmeter
