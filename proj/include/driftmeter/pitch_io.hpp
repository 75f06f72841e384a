#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "driftmeter/audio.hpp"

namespace driftmeter {

// One analysis frame of a fundamental-frequency track. Unvoiced frames keep
// their timestamp but carry no frequency.
struct PitchFrame {
    double time_sec = 0.0;
    double f0_hz = 0.0;      // meaningful only when voiced
    double confidence = 1.0; // in [0, 1]
    bool voiced = false;

    static PitchFrame voiced_at(double t, double hz, double conf = 1.0) {
        return {t, hz, conf, true};
    }
    static PitchFrame unvoiced_at(double t) { return {t, 0.0, 0.0, false}; }
};

// Time-ordered f0 frames with a nominal hop between them.
struct PitchTrack {
    std::vector<PitchFrame> frames; // strictly increasing in time_sec
    double hop_sec = 0.0;

    bool empty() const { return frames.empty(); }
    std::size_t voiced_count() const;
    double start_sec() const { return frames.empty() ? 0.0 : frames.front().time_sec; }
    double end_sec() const { return frames.empty() ? 0.0 : frames.back().time_sec; }
};

// Frame geometry and voicing decision for the f0 estimator.
struct YinConfig {
    int frame_size = 2048;     // samples per analysis block
    int hop_size = 256;        // samples between blocks
    double threshold = 0.1;    // normalized-difference dip threshold
    double f0_min_hz = 60.0;   // plausibility band for voiced output
    double f0_max_hz = 1500.0;

    void validate() const; // throws ArgumentError on out-of-range values
};

// Plausibility band applied when ingesting external pitch CSVs; frames
// outside it are coerced to unvoiced.
struct CsvBand {
    double f0_min_hz = 60.0;
    double f0_max_hz = 1500.0;
};

// Parses `time_sec,f0_hz[,confidence]` rows. Missing time ranges (the
// Sonic Annotator convention for unvoiced regions) are filled with explicit
// unvoiced frames at nominal hop spacing so silence lengths stay measurable.
// The hop is the median inter-row gap unless hop_hint_sec is given.
PitchTrack load_pitch_csv(std::istream& source,
                          std::optional<double> hop_hint_sec = std::nullopt,
                          const CsvBand& band = {});

// Writes voiced frames as `time_sec,f0_hz,confidence` rows (shortest
// round-trip float formatting), preceded by a comment header.
void save_pitch_csv(const PitchTrack& track, std::ostream& out);

// YIN f0 estimation: difference function, cumulative-mean-normalized
// difference, absolute threshold, parabolic interpolation. One frame per
// hop; a frame is voiced iff the normalized difference dips below
// cfg.threshold at a lag inside the plausibility band.
PitchTrack estimate_pitch(const AudioBuffer& audio, const YinConfig& cfg = {});

} // namespace driftmeter
