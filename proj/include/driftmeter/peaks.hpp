#pragma once

#include <cmath>
#include <vector>

#include "driftmeter/histogram.hpp"
#include "driftmeter/segmentation.hpp"

namespace driftmeter {

// A contiguous bump in the smoothed histogram, one performed note.
struct Mountain {
    int lo_bin = 0;
    int hi_bin = 0;
    int apex_bin = 0;       // maximal smoothed count within [lo_bin, hi_bin]
    double apex_height = 0; // smoothed count at the apex
};

// Result of fitting y = c1 + c2*x + c3*exp(-(x-c4)^2/c5) to one mountain.
struct PeakFit {
    double c1 = 0; // baseline offset (counts)
    double c2 = 0; // tilt slope (counts per cent)
    double c3 = 0; // Gaussian amplitude (counts)
    double c4 = 0; // Gaussian center (cents)
    double c5 = 0; // width parameter (cents^2)

    double peak_cents = 0; // argmax of the fitted curve over the mountain range
    double rmse = 0;
    int n_bins = 0;
    bool converged = false;

    double lo_cents = 0; // mountain range (bin centers)
    double hi_cents = 0;

    double eval(double x) const {
        const double d = x - c4;
        return c1 + c2 * x + c3 * std::exp(-d * d / c5);
    }
};

struct PeakConfig {
    double min_height_fraction = 0.1; // of the histogram's global max
    double min_height_frames = 5.0;   // absolute apex floor
    double valley_fraction = 0.1;     // boundary where count falls below this * apex
    int max_iter = 200;
    double tol = 1e-8;        // relative parameter-change convergence threshold
    int min_fit_bins = 6;     // narrower mountains are reported unfitted
    bool fit_smoothed = false; // fit the smoothed histogram instead of the raw one

    void validate() const;
};

// Histogram construction parameters shared by sentence_peaks and the CLI.
struct HistogramConfig {
    double bin_width_cents = 5.0;
    int smooth_window_bins = 7;
};

// Local maxima of the smoothed counts that pass the height test, each grown
// outward until the count rises again or falls below valley_fraction * apex.
// Overlapping ranges split at the interior minimum (assigned to the left
// mountain, keeping ranges disjoint).
std::vector<Mountain> find_mountains(const Histogram& smoothed, const PeakConfig& cfg = {});

// Damped least-squares fit of the tilted Gaussian over the mountain's bins.
// Falls back to converged=false with peak_cents at the apex center when the
// mountain is too narrow or the fit is rejected.
PeakFit fit_tilted_gaussian(const Histogram& raw, const Mountain& m, const PeakConfig& cfg = {});

// Full per-sentence chain: cents conversion, histogram, smoothing, mountain
// detection, per-mountain fit. Results sorted by peak_cents ascending.
std::vector<PeakFit> sentence_peaks(const Sentence& sentence, const CentsConfig& cents_cfg = {},
                                    const HistogramConfig& hist_cfg = {},
                                    const PeakConfig& peak_cfg = {});

} // namespace driftmeter
