#include "driftmeter/synth.hpp"

#include <cmath>
#include <random>

#include "driftmeter/errors.hpp"

namespace driftmeter {

void SynthConfig::validate() const {
    if (n_sentences < 1) throw ArgumentError("synth: need at least one sentence");
    if (notes.empty()) throw ArgumentError("synth: need at least one note");
    if (!(frames_per_sec > 0.0) || !(note_duration_sec > 0.0) || !(gap_sec > 0.0))
        throw ArgumentError("synth: rates and durations must be > 0");
    if (!(jitter_sigma_cents >= 0.0)) throw ArgumentError("synth: jitter must be >= 0");
}

PitchTrack synth_track(const SynthConfig& cfg) {
    cfg.validate();

    std::mt19937 rng(cfg.seed);
    std::normal_distribution<double> jitter(0.0, cfg.jitter_sigma_cents);

    const double hop = 1.0 / cfg.frames_per_sec;
    PitchTrack track;
    track.hop_sec = hop;

    double t = 0.0;
    for (int s = 0; s < cfg.n_sentences; ++s) {
        bool sang = false;
        for (const auto& note : cfg.notes) {
            const int last = note.last_sentence < 0 ? cfg.n_sentences - 1 : note.last_sentence;
            if (s < note.first_sentence || s > last) continue;
            const double center = cfg.base_cents + note.offset_cents +
                                  cfg.drift_cents_per_sentence * static_cast<double>(s);
            const auto n_frames = static_cast<long>(std::round(cfg.note_duration_sec / hop));
            for (long k = 0; k < n_frames; ++k) {
                double c = center;
                if (cfg.jitter_sigma_cents > 0.0) c += jitter(rng);
                track.frames.push_back(PitchFrame::voiced_at(t, cents_to_hz(c, cfg.cents)));
                t += hop;
            }
            sang = true;
        }
        if (sang) t += cfg.gap_sec;
    }

    if (track.frames.empty()) throw ArgumentError("synth: configuration produced no frames");
    return track;
}

} // namespace driftmeter
