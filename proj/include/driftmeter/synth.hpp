#pragma once

#include <cstdint>
#include <vector>

#include "driftmeter/histogram.hpp"
#include "driftmeter/pitch_io.hpp"

namespace driftmeter {

// One planted note of a synthetic corpus. The note sounds in sentences
// [first_sentence, last_sentence] (last = -1 means all).
struct SynthNote {
    double offset_cents = 0.0;
    int first_sentence = 0;
    int last_sentence = -1;
};

// Deterministic generator for drifting-voice test corpora: n sentences of
// back-to-back notes separated by silences, every note drifting by
// drift_cents_per_sentence, with Gaussian frame jitter.
struct SynthConfig {
    int n_sentences = 16;
    std::vector<SynthNote> notes = {{0.0}, {200.0}, {500.0}};
    double base_cents = 4500.0; // around A3 with the C0 reference
    double drift_cents_per_sentence = -2.0;
    double jitter_sigma_cents = 8.0;
    double frames_per_sec = 170.0;
    double note_duration_sec = 2.0;
    double gap_sec = 0.8; // silence between sentences
    std::uint32_t seed = 42;
    CentsConfig cents;

    void validate() const;
};

// Voiced frames only; the silent stretches are plain time gaps, as an
// external pitch tracker's CSV would have them.
PitchTrack synth_track(const SynthConfig& cfg);

} // namespace driftmeter
