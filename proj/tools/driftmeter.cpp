#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "driftmeter/errors.hpp"
#include "driftmeter/pipeline.hpp"
#include "driftmeter/plot.hpp"
#include "driftmeter/synth.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitAnalysis = 4;

bool use_color() {
    if (std::getenv("DRIFTMETER_NO_COLOR")) return false;
    return isatty(fileno(stderr));
}

void print_error(const std::string& msg) {
    if (use_color())
        std::cerr << "\033[31merror:\033[0m " << msg << "\n";
    else
        std::cerr << "error: " << msg << "\n";
}

driftmeter::InputKind resolve_kind(const std::string& flag, const std::string& path) {
    if (flag == "wav") return driftmeter::InputKind::wav;
    if (flag == "csv") return driftmeter::InputKind::pitch_csv;
    // auto: by extension
    auto ext = std::filesystem::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".wav" ? driftmeter::InputKind::wav : driftmeter::InputKind::pitch_csv;
}

std::vector<double> parse_note_list(const std::string& csv) {
    std::vector<double> notes;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            notes.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw driftmeter::ArgumentError("synth: bad note offset '" + item + "'");
        }
    }
    return notes;
}

int run_analyze(const driftmeter::PipelineConfig& cfg, const std::string& plots) {
    using namespace driftmeter;

    RunArtifacts art = run_pipeline(cfg);
    if (!plots.empty()) {
        auto kinds = parse_plot_kinds(plots);
        auto extra = emit_plots(art, kinds, cfg.out_dir);
        art.manifest.insert(art.manifest.end(), extra.begin(), extra.end());
    }

    const auto& rep = art.report;
    std::cout << "sentences: " << art.sentences.size() << "\n";
    std::cout << "peak points: " << rep.points.size() << "\n";
    std::cout << "clusters: " << rep.clusters.size() << " (" << rep.n_significant_clusters
              << " significant), noise points: " << rep.noise.size() << "\n";
    for (const auto& [cluster, line] : rep.clusters) {
        std::cout << "  cluster " << cluster.id << ": " << cluster.points.size() << " points"
                  << (cluster.significant ? "" : " (not significant)");
        if (line) {
            std::cout << ", slope " << line->slope << " cents/sentence, r2 " << line->r2;
            if (line->slope_cents_per_minute)
                std::cout << " (" << *line->slope_cents_per_minute << " cents/min)";
        } else {
            std::cout << ", no drift line (single sentence)";
        }
        std::cout << "\n";
    }
    if (rep.mean_slope) std::cout << "mean slope: " << *rep.mean_slope << " cents/sentence\n";
    for (const auto& f : art.manifest) std::cout << "wrote " << f << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftmeter: measures intonation drift across an unaccompanied vocal performance"};
    app.require_subcommand(1);

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "run the full drift analysis on one recording");
    driftmeter::PipelineConfig cfg;
    std::string input_kind_flag = "auto";
    std::string plots;
    double fixed_segments = 0.0;
    double hop_hint = 0.0;

    analyze->add_option("--input", cfg.input_path, "input WAV or pitch CSV")->required();
    analyze->add_option("--input-kind", input_kind_flag, "wav | csv (default: by extension)")
        ->check(CLI::IsMember({"auto", "wav", "csv"}));
    analyze->add_option("--out", cfg.out_dir, "output directory")->required();

    analyze->add_option("--bin-width", cfg.hist.bin_width_cents, "histogram bin width in cents");
    analyze->add_option("--smooth-window", cfg.hist.smooth_window_bins,
                        "moving-average window in bins (odd)");
    analyze->add_option("--min-silence", cfg.segmentation.min_silence_sec,
                        "silence that separates sentences, seconds");
    analyze->add_option("--min-sentence", cfg.segmentation.min_sentence_sec,
                        "minimum sentence length, seconds");
    analyze->add_option("--fixed-segments", fixed_segments,
                        "segment into fixed windows of this many seconds instead of silences");
    analyze->add_option("--skip-leading", cfg.skip_leading_sentences,
                        "exclude this many leading sentences (e.g. an introduction)");
    analyze->add_option("--eps", cfg.cluster.eps, "DBSCAN neighborhood radius (scaled units)");
    analyze->add_option("--min-samples", cfg.cluster.min_samples, "DBSCAN core threshold");
    analyze->add_option("--cents-scale", cfg.cluster.cents_scale, "cents per clustering unit");
    analyze->add_option("--index-scale", cfg.cluster.index_scale,
                        "sentence indices per clustering unit");
    analyze->add_flag("--cents-only", cfg.cluster.cents_only,
                      "cluster on the cents axis alone, ignoring sentence numbers");
    analyze->add_option("--min-cluster", cfg.cluster.min_significant_size,
                        "clusters smaller than this are reported as not significant");
    analyze->add_option("--ref-hz", cfg.cents.ref_hz, "reference frequency for 0 cents");
    analyze->add_option("--yin-threshold", cfg.yin.threshold, "YIN voicing threshold");
    analyze->add_option("--yin-frame", cfg.yin.frame_size, "YIN block size, samples");
    analyze->add_option("--yin-hop", cfg.yin.hop_size, "YIN step size, samples");
    analyze->add_option("--f0-min", cfg.yin.f0_min_hz, "low edge of the plausible f0 band, Hz");
    analyze->add_option("--f0-max", cfg.yin.f0_max_hz, "high edge of the plausible f0 band, Hz");
    analyze->add_option("--hop-hint", hop_hint, "frame hop of the input CSV, seconds");
    analyze->add_option("--min-height-frames", cfg.peaks.min_height_frames,
                        "absolute apex height floor");
    analyze->add_option("--min-height-fraction", cfg.peaks.min_height_fraction,
                        "apex height floor as a fraction of the histogram max");
    analyze->add_flag("--fit-smoothed", cfg.peaks.fit_smoothed,
                      "fit peaks on the smoothed histogram instead of the raw one");
    analyze->add_option("--plots", plots,
                        "comma list of track,histogram,fit,scatter,clusters to emit as SVG");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic drifting pitch CSV corpus");
    driftmeter::SynthConfig synth_cfg;
    std::string synth_out;
    std::string synth_notes = "0,200,500";
    synth->add_option("--out", synth_out, "output pitch CSV path")->required();
    synth->add_option("--sentences", synth_cfg.n_sentences, "number of sentences");
    synth->add_option("--notes", synth_notes, "comma list of note offsets in cents");
    synth->add_option("--base-cents", synth_cfg.base_cents, "pitch of offset 0, cents");
    synth->add_option("--drift", synth_cfg.drift_cents_per_sentence, "drift per sentence, cents");
    synth->add_option("--jitter", synth_cfg.jitter_sigma_cents, "frame jitter sigma, cents");
    synth->add_option("--fps", synth_cfg.frames_per_sec, "frames per second");
    synth->add_option("--note-dur", synth_cfg.note_duration_sec, "seconds each note is held");
    synth->add_option("--gap", synth_cfg.gap_sec, "silence between sentences, seconds");
    synth->add_option("--seed", synth_cfg.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help or the parse diagnostic
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            cfg.input_kind = resolve_kind(input_kind_flag, cfg.input_path);
            cfg.csv_band = {cfg.yin.f0_min_hz, cfg.yin.f0_max_hz}; // one band for both paths
            if (fixed_segments > 0.0) {
                cfg.seg_mode = driftmeter::SegmentationMode::fixed_length;
                cfg.segmentation.fixed_len_sec = fixed_segments;
            }
            if (hop_hint > 0.0) cfg.csv_hop_hint_sec = hop_hint;
            return run_analyze(cfg, plots);
        }
        if (synth->parsed()) {
            synth_cfg.notes.clear();
            for (double offset : parse_note_list(synth_notes))
                synth_cfg.notes.push_back({offset, 0, -1});
            auto track = driftmeter::synth_track(synth_cfg);
            std::ofstream out(synth_out, std::ios::binary);
            if (!out) throw driftmeter::InputError("synth: cannot write " + synth_out);
            driftmeter::save_pitch_csv(track, out);
            std::cout << "wrote " << synth_out << " (" << track.frames.size() << " frames, "
                      << synth_cfg.n_sentences << " sentences)\n";
            return 0;
        }
    } catch (const driftmeter::ArgumentError& e) {
        print_error(e.what());
        return kExitUsage;
    } catch (const driftmeter::InputError& e) {
        print_error(e.what());
        return kExitInput;
    } catch (const driftmeter::AnalysisError& e) {
        print_error(e.what());
        return kExitAnalysis;
    } catch (const std::exception& e) {
        print_error(e.what());
        return kExitAnalysis;
    }
    return 0;
}
