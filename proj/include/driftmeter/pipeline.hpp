#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftmeter/drift.hpp"
#include "driftmeter/histogram.hpp"
#include "driftmeter/peaks.hpp"
#include "driftmeter/pitch_io.hpp"
#include "driftmeter/segmentation.hpp"

namespace driftmeter {

enum class InputKind { wav, pitch_csv };

enum class SegmentationMode { silence, fixed_length };

struct PipelineConfig {
    std::string input_path;
    InputKind input_kind = InputKind::pitch_csv;
    std::string out_dir;

    YinConfig yin;
    CsvBand csv_band;
    std::optional<double> csv_hop_hint_sec;
    SegmentationMode seg_mode = SegmentationMode::silence;
    SegmentationConfig segmentation;
    CentsConfig cents;
    HistogramConfig hist;
    PeakConfig peaks;
    ClusterConfig cluster;
    int skip_leading_sentences = 0;
};

struct RunArtifacts {
    DriftReport report;
    PitchTrack track;
    std::vector<Sentence> sentences;
    std::vector<std::pair<Sentence, std::vector<PeakFit>>> peaks_by_sentence;

    // whole-performance histogram and its fitted mountains, for the
    // histogram/fit plots
    Histogram global_raw;
    Histogram global_smoothed;
    std::vector<std::pair<Mountain, PeakFit>> global_fits;

    std::vector<std::string> manifest; // files actually written
};

// Executes load -> segment -> per-sentence peaks -> drift and writes
// report.json, peaks.csv and clusters.csv into cfg.out_dir. Any stage error
// is rethrown with the stage name prefixed and partial outputs are removed.
RunArtifacts run_pipeline(const PipelineConfig& cfg);

// The analysis chain without any file output (also used by run_pipeline).
RunArtifacts analyze_track(const PitchTrack& track, const PipelineConfig& cfg);

// report.json body (deterministic key order and float formatting).
std::string report_json(const RunArtifacts& artifacts, const PipelineConfig& cfg);

// peaks.csv body: sentence_index, lo_cents, hi_cents, c1..c5, peak_cents,
// rmse, converged.
std::string peaks_csv(const RunArtifacts& artifacts);

} // namespace driftmeter
