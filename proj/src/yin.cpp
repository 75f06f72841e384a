#include <algorithm>
#include <cmath>
#include <vector>

#include "driftmeter/errors.hpp"
#include "driftmeter/pitch_io.hpp"

namespace driftmeter {
namespace {

// d(tau) = sum_j (x[j] - x[j+tau])^2 over half the frame.
void difference(const double* x, int half, int tau_max, std::vector<double>& d) {
    for (int tau = 0; tau <= tau_max; ++tau) {
        double acc = 0.0;
        for (int j = 0; j < half; ++j) {
            const double delta = x[j] - x[j + tau];
            acc += delta * delta;
        }
        d[tau] = acc;
    }
}

// d'(tau) = d(tau) * tau / sum_{1..tau} d(k); d'(0) = 1. A zero running sum
// (silence) maps to 1 so the frame reads as aperiodic.
void cumulative_mean_normalize(std::vector<double>& d, int tau_max) {
    double running = 0.0;
    d[0] = 1.0;
    for (int tau = 1; tau <= tau_max; ++tau) {
        running += d[tau];
        d[tau] = running > 0.0 ? d[tau] * tau / running : 1.0;
    }
}

// Refine the period estimate by fitting a parabola through the raw
// difference values around tau. Selection happens on the normalized curve,
// the abscissa comes from the unnormalized one.
double parabolic_refine(const std::vector<double>& d_raw, int tau, int tau_max) {
    if (tau <= 0 || tau >= tau_max) return tau;
    const double s0 = d_raw[tau - 1], s1 = d_raw[tau], s2 = d_raw[tau + 1];
    const double denom = 2.0 * (2.0 * s1 - s2 - s0);
    if (denom == 0.0) return tau;
    const double adj = (s2 - s0) / denom;
    if (std::abs(adj) > 1.0) return tau;
    return tau + adj;
}

} // namespace

PitchTrack estimate_pitch(const AudioBuffer& audio, const YinConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(audio.samples.size());
    if (n < cfg.frame_size)
        throw InputError("insufficient-input: audio shorter than one analysis frame");

    const double fs = audio.sample_rate_hz;
    if (cfg.frame_size < 2.0 * fs / cfg.f0_min_hz)
        throw ArgumentError("yin-config: frame too short for two periods of f0_min_hz");
    const int half = cfg.frame_size / 2;
    const int tau_min = std::max(2, static_cast<int>(std::floor(fs / cfg.f0_max_hz)));
    const int tau_max = std::min(half - 1, static_cast<int>(std::ceil(fs / cfg.f0_min_hz)) + 1);
    if (tau_min >= tau_max)
        throw ArgumentError("yin-config: plausibility band unresolvable at this frame size");

    const int n_frames = (n - cfg.frame_size) / cfg.hop_size + 1;

    PitchTrack track;
    track.hop_sec = cfg.hop_size / fs;
    track.frames.reserve(n_frames);

    std::vector<double> d(tau_max + 1), d_norm;
    for (int k = 0; k < n_frames; ++k) {
        const double* frame = audio.samples.data() + static_cast<std::size_t>(k) * cfg.hop_size;
        const double t = (static_cast<double>(k) * cfg.hop_size) / fs;

        difference(frame, half, tau_max, d);
        d_norm = d;
        cumulative_mean_normalize(d_norm, tau_max);

        int tau = -1;
        for (int cand = tau_min; cand <= tau_max; ++cand) {
            if (d_norm[cand] < cfg.threshold) {
                while (cand + 1 <= tau_max && d_norm[cand + 1] < d_norm[cand]) ++cand;
                tau = cand;
                break;
            }
        }

        if (tau < 0) {
            track.frames.push_back(PitchFrame::unvoiced_at(t));
            continue;
        }

        const double period = parabolic_refine(d, tau, tau_max);
        const double f0 = fs / period;
        if (f0 < cfg.f0_min_hz || f0 > cfg.f0_max_hz) {
            track.frames.push_back(PitchFrame::unvoiced_at(t));
            continue;
        }
        const double conf = std::clamp(1.0 - d_norm[tau], 0.0, 1.0);
        track.frames.push_back(PitchFrame::voiced_at(t, f0, conf));
    }
    return track;
}

} // namespace driftmeter
