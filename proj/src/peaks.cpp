#include "driftmeter/peaks.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "driftmeter/errors.hpp"

namespace driftmeter {

void PeakConfig::validate() const {
    if (!(min_height_fraction > 0.0 && min_height_fraction <= 1.0))
        throw ArgumentError("peak-config: min_height_fraction must be in (0,1]");
    if (!(min_height_frames > 0.0))
        throw ArgumentError("peak-config: min_height_frames must be > 0");
    if (!(valley_fraction > 0.0 && valley_fraction < 1.0))
        throw ArgumentError("peak-config: valley_fraction must be in (0,1)");
    if (max_iter < 1 || !(tol > 0.0)) throw ArgumentError("peak-config: bad solver limits");
    if (min_fit_bins < 6) throw ArgumentError("peak-config: min_fit_bins must be >= 6");
}

namespace {

// Apex candidates: centers of maximal plateaus that sit strictly above both
// flanks (histogram edges count as flanks of height -inf).
std::vector<int> apex_candidates(const std::vector<double>& c) {
    std::vector<int> out;
    const int n = static_cast<int>(c.size());
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && c[j + 1] == c[i]) ++j;
        const bool rises_left = i == 0 || c[i - 1] < c[i];
        const bool falls_right = j == n - 1 || c[j + 1] < c[i];
        const bool full_span_plateau = i == 0 && j == n - 1; // flat histogram, no mountain
        if (rises_left && falls_right && !full_span_plateau && c[i] > 0.0)
            out.push_back((i + j) / 2);
        i = j + 1;
    }
    return out;
}

// Grow a mountain from its apex: step outward while the count does not rise;
// stop after including the first bin below the valley floor.
void grow_range(const std::vector<double>& c, int apex, double floor_count, int& lo, int& hi) {
    const int n = static_cast<int>(c.size());
    lo = apex;
    while (lo - 1 >= 0 && c[lo - 1] <= c[lo]) {
        --lo;
        if (c[lo] < floor_count) break;
    }
    hi = apex;
    while (hi + 1 < n && c[hi + 1] <= c[hi]) {
        ++hi;
        if (c[hi] < floor_count) break;
    }
}

// ---- damped least-squares machinery ------------------------------------

struct Model {
    // Parameter order: c1, c2, c3, c4, c5 (x already centered by the caller).
    static double eval(const std::array<double, 5>& p, double x) {
        const double d = x - p[3];
        return p[0] + p[1] * x + p[2] * std::exp(-d * d / p[4]);
    }

    static void jacobian_row(const std::array<double, 5>& p, double x, double* row) {
        const double d = x - p[3];
        const double e = std::exp(-d * d / p[4]);
        row[0] = 1.0;
        row[1] = x;
        row[2] = e;
        row[3] = p[2] * e * 2.0 * d / p[4];
        row[4] = p[2] * e * d * d / (p[4] * p[4]);
    }
};

double sum_sq_residuals(const std::array<double, 5>& p, const std::vector<double>& xs,
                        const std::vector<double>& ys) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = Model::eval(p, xs[i]) - ys[i];
        acc += r * r;
    }
    return acc;
}

// Gaussian elimination with partial pivoting on the 5x5 normal equations.
bool solve5(std::array<std::array<double, 6>, 5>& a, std::array<double, 5>& x) {
    for (int col = 0; col < 5; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 5; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        for (int r = col + 1; r < 5; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 6; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = 4; r >= 0; --r) {
        double acc = a[r][5];
        for (int c = r + 1; c < 5; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

struct LmResult {
    std::array<double, 5> p{};
    double cost = 0.0;
    bool converged = false;
};

LmResult levenberg_marquardt(std::array<double, 5> p, const std::vector<double>& xs,
                             const std::vector<double>& ys, int max_iter, double tol) {
    const std::size_t n = xs.size();
    double lambda = 1e-3;
    double cost = sum_sq_residuals(p, xs, ys);
    bool converged = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        // normal equations: A = J^T J, g = J^T r
        std::array<std::array<double, 5>, 5> A{};
        std::array<double, 5> g{};
        double row[5];
        for (std::size_t i = 0; i < n; ++i) {
            Model::jacobian_row(p, xs[i], row);
            const double r = Model::eval(p, xs[i]) - ys[i];
            for (int a = 0; a < 5; ++a) {
                g[a] += row[a] * r;
                for (int b = a; b < 5; ++b) A[a][b] += row[a] * row[b];
            }
        }
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < a; ++b) A[a][b] = A[b][a];

        std::array<std::array<double, 6>, 5> aug{};
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) aug[a][b] = A[a][b];
            aug[a][a] += lambda * std::max(A[a][a], 1e-12);
            aug[a][5] = -g[a];
        }

        std::array<double, 5> delta{};
        if (!solve5(aug, delta)) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }

        // keep c5 positive by halving the step
        int halvings = 0;
        while (p[4] + delta[4] <= 0.0 && halvings < 40) {
            for (double& d : delta) d *= 0.5;
            ++halvings;
        }
        if (p[4] + delta[4] <= 0.0) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }

        std::array<double, 5> p_new;
        for (int a = 0; a < 5; ++a) p_new[a] = p[a] + delta[a];
        const double cost_new = sum_sq_residuals(p_new, xs, ys);

        if (cost_new <= cost && std::isfinite(cost_new)) {
            double max_rel = 0.0;
            for (int a = 0; a < 5; ++a)
                max_rel = std::max(max_rel, std::abs(delta[a]) / std::max(1.0, std::abs(p[a])));
            p = p_new;
            cost = cost_new;
            lambda = std::max(lambda * 0.1, 1e-14);
            if (max_rel < tol) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {p, cost, converged};
}

// Half-width at half maximum around the apex, in x units. Falls back to a
// quarter of the span where no crossing exists.
double half_width_at_half_max(const std::vector<double>& xs, const std::vector<double>& ys,
                              std::size_t apex_idx, double baseline) {
    const double half = baseline + 0.5 * (ys[apex_idx] - baseline);
    double left = -1.0, right = -1.0;
    for (std::size_t i = apex_idx; i-- > 0;) {
        if (ys[i] <= half) {
            left = xs[apex_idx] - xs[i];
            break;
        }
    }
    for (std::size_t i = apex_idx + 1; i < ys.size(); ++i) {
        if (ys[i] <= half) {
            right = xs[i] - xs[apex_idx];
            break;
        }
    }
    if (left > 0.0 && right > 0.0) return 0.5 * (left + right);
    if (left > 0.0) return left;
    if (right > 0.0) return right;
    return 0.25 * (xs.back() - xs.front());
}

double best_constant_cost(const std::vector<double>& ys) {
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    double acc = 0.0;
    for (double y : ys) acc += (y - mean) * (y - mean);
    return acc;
}

// Argmax of the fitted curve over [lo, hi]: coarse grid at 10x bin
// resolution, then derivative bisection between the grid neighbors.
double locate_peak(const PeakFit& fit, double lo, double hi, double bin_width) {
    const double step = bin_width / 10.0;
    const auto n_steps = static_cast<long>(std::ceil((hi - lo) / step));
    double best_x = lo, best_y = fit.eval(lo);
    auto consider = [&](double x) {
        const double y = fit.eval(x);
        if (y > best_y) {
            best_y = y;
            best_x = x;
        }
    };
    for (long k = 1; k <= n_steps; ++k) consider(std::min(lo + static_cast<double>(k) * step, hi));
    // bin centers exactly, so the reported peak never undercuts one
    const auto n_bins = static_cast<long>(std::round((hi - lo) / bin_width));
    for (long j = 0; j <= n_bins; ++j) consider(std::min(lo + static_cast<double>(j) * bin_width, hi));

    auto deriv = [&](double x) {
        const double d = x - fit.c4;
        return fit.c2 - fit.c3 * std::exp(-d * d / fit.c5) * 2.0 * d / fit.c5;
    };

    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    if (deriv(a) > 0.0 && deriv(b) < 0.0) {
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (a + b);
            (deriv(mid) > 0.0 ? a : b) = mid;
        }
        const double refined = 0.5 * (a + b);
        if (fit.eval(refined) >= best_y) return refined;
    }
    return best_x;
}

} // namespace

std::vector<Mountain> find_mountains(const Histogram& smoothed, const PeakConfig& cfg) {
    cfg.validate();
    const auto& c = smoothed.counts;
    const double global_max = smoothed.max_count();
    const double min_height = std::max(cfg.min_height_frames, cfg.min_height_fraction * global_max);

    std::vector<Mountain> mountains;
    for (int apex : apex_candidates(c)) {
        const double h = c[static_cast<std::size_t>(apex)];
        if (h < min_height) continue;
        Mountain m;
        m.apex_bin = apex;
        m.apex_height = h;
        grow_range(c, apex, cfg.valley_fraction * h, m.lo_bin, m.hi_bin);
        mountains.push_back(m);
    }

    // Overlaps split at the interior minimum between adjacent apexes; the
    // minimum bin goes to the left mountain so ranges stay disjoint.
    for (std::size_t i = 1; i < mountains.size(); ++i) {
        Mountain& left = mountains[i - 1];
        Mountain& right = mountains[i];
        if (right.lo_bin <= left.hi_bin) {
            int min_bin = left.apex_bin + 1;
            for (int b = left.apex_bin + 1; b < right.apex_bin; ++b)
                if (c[static_cast<std::size_t>(b)] < c[static_cast<std::size_t>(min_bin)])
                    min_bin = b;
            left.hi_bin = min_bin;
            right.lo_bin = min_bin + 1;
        }
    }
    return mountains;
}

PeakFit fit_tilted_gaussian(const Histogram& raw, const Mountain& m, const PeakConfig& cfg) {
    cfg.validate();
    PeakFit fit;
    fit.n_bins = m.hi_bin - m.lo_bin + 1;
    fit.lo_cents = raw.bin_center(static_cast<std::size_t>(m.lo_bin));
    fit.hi_cents = raw.bin_center(static_cast<std::size_t>(m.hi_bin));
    const double apex_center = raw.bin_center(static_cast<std::size_t>(m.apex_bin));

    auto fallback = [&]() {
        fit.converged = false;
        fit.peak_cents = apex_center;
        return fit;
    };

    if (fit.n_bins < cfg.min_fit_bins) return fallback();

    // Center x at the apex so the normal equations stay well conditioned and
    // the fit is translation-equivariant by construction.
    std::vector<double> xs(static_cast<std::size_t>(fit.n_bins));
    std::vector<double> ys(static_cast<std::size_t>(fit.n_bins));
    for (int b = m.lo_bin; b <= m.hi_bin; ++b) {
        xs[static_cast<std::size_t>(b - m.lo_bin)] =
            raw.bin_center(static_cast<std::size_t>(b)) - apex_center;
        ys[static_cast<std::size_t>(b - m.lo_bin)] = raw.counts[static_cast<std::size_t>(b)];
    }
    const std::size_t apex_idx = static_cast<std::size_t>(m.apex_bin - m.lo_bin);

    std::array<double, 5> p;
    p[0] = std::min(ys.front(), ys.back());
    p[1] = (ys.back() - ys.front()) / (xs.back() - xs.front());
    p[2] = std::max(ys[apex_idx] - p[0], 1e-6);
    p[3] = 0.0;
    const double hwhm = half_width_at_half_max(xs, ys, apex_idx, p[0]);
    const double c5_floor = 4.0 * raw.bin_width_cents * raw.bin_width_cents;
    p[4] = std::max(hwhm * hwhm / std::log(2.0), c5_floor);

    const LmResult res = levenberg_marquardt(p, xs, ys, cfg.max_iter, cfg.tol);

    fit.c1 = res.p[0] - res.p[1] * apex_center; // undo the centering
    fit.c2 = res.p[1];
    fit.c3 = res.p[2];
    fit.c4 = res.p[3] + apex_center;
    fit.c5 = res.p[4];
    fit.rmse = std::sqrt(res.cost / static_cast<double>(fit.n_bins));
    fit.converged = res.converged;

    const bool shape_ok = fit.c3 > 0.0 && fit.c5 > 0.0 && fit.c4 >= fit.lo_cents &&
                          fit.c4 <= fit.hi_cents && res.cost <= best_constant_cost(ys) + 1e-9;
    if (!res.converged || !shape_ok) return fallback();

    fit.peak_cents = locate_peak(fit, fit.lo_cents, fit.hi_cents, raw.bin_width_cents);
    return fit;
}

std::vector<PeakFit> sentence_peaks(const Sentence& sentence, const CentsConfig& cents_cfg,
                                    const HistogramConfig& hist_cfg, const PeakConfig& peak_cfg) {
    std::vector<double> cents;
    cents.reserve(sentence.frames.size());
    for (const auto& f : sentence.frames)
        if (f.voiced && f.f0_hz > 0.0) cents.push_back(hz_to_cents(f.f0_hz, cents_cfg));

    std::vector<PeakFit> fits;
    if (cents.empty()) return fits; // empty-histogram propagated as empty result

    // One smoothing window of zero margin around the data keeps the edge
    // windows from distorting narrow histograms and gives every mountain
    // baseline bins to fit against.
    const auto [mn, mx] = std::minmax_element(cents.begin(), cents.end());
    const double margin = hist_cfg.smooth_window_bins * hist_cfg.bin_width_cents;
    const Histogram raw = build_histogram(cents, hist_cfg.bin_width_cents,
                                          std::make_pair(*mn - margin, *mx + margin));
    const Histogram smoothed = smooth_moving_average(raw, hist_cfg.smooth_window_bins);
    const Histogram& fit_source = peak_cfg.fit_smoothed ? smoothed : raw;

    for (const Mountain& m : find_mountains(smoothed, peak_cfg))
        fits.push_back(fit_tilted_gaussian(fit_source, m, peak_cfg));

    std::sort(fits.begin(), fits.end(),
              [](const PeakFit& a, const PeakFit& b) { return a.peak_cents < b.peak_cents; });
    return fits;
}

} // namespace driftmeter
