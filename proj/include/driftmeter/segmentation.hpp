#pragma once

#include <vector>

#include "driftmeter/pitch_io.hpp"

namespace driftmeter {

// One musical phrase: a run of voiced frames delimited by long silences
// (or a fixed-length window).
struct Sentence {
    int index = 0;
    double start_sec = 0.0;
    double end_sec = 0.0;
    std::vector<PitchFrame> frames; // voiced frames only, time-ordered
};

struct SegmentationConfig {
    double min_silence_sec = 0.5;  // gap that splits two sentences
    double min_sentence_sec = 1.0; // shorter candidates are dropped
    double fixed_len_sec = 20.0;   // window length for fixed mode
    int min_voiced_frames = 10;    // candidates with fewer voiced frames are dropped

    void validate() const;
};

// Candidate runs before the length/content filter: maximal groups of voiced
// frames whose internal gaps are each < min_silence_sec.
std::vector<Sentence> silence_runs(const PitchTrack& track, double min_silence_sec);

// Runs shorter than min_sentence_sec or with fewer than min_voiced_frames
// voiced frames are dropped; survivors are re-indexed 0..n-1. Start/end are
// the first/last voiced frame times of the run.
std::vector<Sentence> segment_by_silence(const PitchTrack& track, const SegmentationConfig& cfg);

// Consecutive windows of fixed_len_sec anchored at the track start; windows
// with too few voiced frames are dropped and the rest re-indexed.
std::vector<Sentence> segment_fixed(const PitchTrack& track, const SegmentationConfig& cfg);

} // namespace driftmeter
