#include "driftmeter/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "driftmeter/errors.hpp"

namespace driftmeter {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Rethrow any library error with the pipeline stage prepended.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw ArgumentError(std::string(name) + ": " + e.what());
    } catch (const AnalysisError& e) {
        throw AnalysisError(std::string(name) + ": " + e.what());
    }
}

json config_json(const PipelineConfig& cfg) {
    json j;
    j["input"] = cfg.input_path;
    j["input_kind"] = cfg.input_kind == InputKind::wav ? "wav" : "csv";
    j["yin"] = {{"frame_size", cfg.yin.frame_size},
                {"hop_size", cfg.yin.hop_size},
                {"threshold", cfg.yin.threshold},
                {"f0_min_hz", cfg.yin.f0_min_hz},
                {"f0_max_hz", cfg.yin.f0_max_hz}};
    j["csv_band"] = {{"f0_min_hz", cfg.csv_band.f0_min_hz}, {"f0_max_hz", cfg.csv_band.f0_max_hz}};
    if (cfg.csv_hop_hint_sec) j["csv_hop_hint_sec"] = *cfg.csv_hop_hint_sec;
    j["segmentation"] = {
        {"mode", cfg.seg_mode == SegmentationMode::silence ? "silence" : "fixed-length"},
        {"min_silence_sec", cfg.segmentation.min_silence_sec},
        {"min_sentence_sec", cfg.segmentation.min_sentence_sec},
        {"fixed_len_sec", cfg.segmentation.fixed_len_sec},
        {"min_voiced_frames", cfg.segmentation.min_voiced_frames}};
    j["cents"] = {{"ref_hz", cfg.cents.ref_hz}};
    j["histogram"] = {{"bin_width_cents", cfg.hist.bin_width_cents},
                      {"smooth_window_bins", cfg.hist.smooth_window_bins}};
    j["peaks"] = {{"min_height_fraction", cfg.peaks.min_height_fraction},
                  {"min_height_frames", cfg.peaks.min_height_frames},
                  {"valley_fraction", cfg.peaks.valley_fraction},
                  {"max_iter", cfg.peaks.max_iter},
                  {"tol", cfg.peaks.tol},
                  {"min_fit_bins", cfg.peaks.min_fit_bins},
                  {"fit_smoothed", cfg.peaks.fit_smoothed}};
    j["cluster"] = {{"eps", cfg.cluster.eps},
                    {"min_samples", cfg.cluster.min_samples},
                    {"cents_scale", cfg.cluster.cents_scale},
                    {"index_scale", cfg.cluster.index_scale},
                    {"min_significant_size", cfg.cluster.min_significant_size},
                    {"cents_only", cfg.cluster.cents_only}};
    j["skip_leading_sentences"] = cfg.skip_leading_sentences;
    return j;
}

json point_json(const PeakPoint& p) {
    return {{"sentence_index", p.sentence_index}, {"cents", p.cents}};
}

void append_csv_double(std::string& buf, double v) {
    char tmp[32];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    (void)ec;
    buf.append(tmp, ptr);
}

} // namespace

RunArtifacts analyze_track(const PitchTrack& track, const PipelineConfig& cfg) {
    RunArtifacts art;
    art.track = track;

    art.sentences = stage("segmentation", [&] {
        return cfg.seg_mode == SegmentationMode::silence
                   ? segment_by_silence(track, cfg.segmentation)
                   : segment_fixed(track, cfg.segmentation);
    });

    if (cfg.skip_leading_sentences > 0) {
        const auto k = std::min<std::size_t>(art.sentences.size(),
                                             static_cast<std::size_t>(cfg.skip_leading_sentences));
        art.sentences.erase(art.sentences.begin(), art.sentences.begin() + static_cast<long>(k));
        for (std::size_t i = 0; i < art.sentences.size(); ++i)
            art.sentences[i].index = static_cast<int>(i);
    }

    stage("peaks", [&] {
        for (const auto& s : art.sentences)
            art.peaks_by_sentence.emplace_back(s, sentence_peaks(s, cfg.cents, cfg.hist, cfg.peaks));
        return 0;
    });

    // whole-performance histogram for the figure outputs
    stage("histogram", [&] {
        std::vector<double> cents;
        for (const auto& s : art.sentences)
            for (const auto& f : s.frames)
                if (f.voiced) cents.push_back(hz_to_cents(f.f0_hz, cfg.cents));
        if (!cents.empty()) {
            const auto [mn, mx] = std::minmax_element(cents.begin(), cents.end());
            const double margin = cfg.hist.smooth_window_bins * cfg.hist.bin_width_cents;
            art.global_raw = build_histogram(cents, cfg.hist.bin_width_cents,
                                             std::make_pair(*mn - margin, *mx + margin));
            art.global_smoothed = smooth_moving_average(art.global_raw, cfg.hist.smooth_window_bins);
            const Histogram& source = cfg.peaks.fit_smoothed ? art.global_smoothed : art.global_raw;
            for (const Mountain& m : find_mountains(art.global_smoothed, cfg.peaks))
                art.global_fits.emplace_back(m, fit_tilted_gaussian(source, m, cfg.peaks));
        }
        return 0;
    });

    art.report = stage("drift", [&] { return analyze_drift(art.peaks_by_sentence, cfg.cluster); });
    return art;
}

std::string report_json(const RunArtifacts& art, const PipelineConfig& cfg) {
    json j;
    j["config"] = config_json(cfg);

    j["sentences"] = json::array();
    for (const auto& s : art.sentences)
        j["sentences"].push_back({{"index", s.index},
                                  {"start_sec", s.start_sec},
                                  {"end_sec", s.end_sec},
                                  {"n_voiced_frames", s.frames.size()}});

    j["peaks"] = json::array();
    for (const auto& [sentence, fits] : art.peaks_by_sentence)
        for (const auto& f : fits)
            j["peaks"].push_back({{"sentence_index", sentence.index},
                                  {"lo_cents", f.lo_cents},
                                  {"hi_cents", f.hi_cents},
                                  {"c1", f.c1},
                                  {"c2", f.c2},
                                  {"c3", f.c3},
                                  {"c4", f.c4},
                                  {"c5", f.c5},
                                  {"peak_cents", f.peak_cents},
                                  {"rmse", f.rmse},
                                  {"n_bins", f.n_bins},
                                  {"converged", f.converged}});

    j["clusters"] = json::array();
    for (const auto& [cluster, line] : art.report.clusters) {
        json jc = {{"id", cluster.id}, {"significant", cluster.significant}};
        jc["members"] = json::array();
        for (const auto& p : cluster.points) jc["members"].push_back(point_json(p));
        if (line) {
            jc["slope"] = line->slope;
            jc["intercept"] = line->intercept;
            jc["r2"] = line->r2;
            if (line->slope_cents_per_minute)
                jc["slope_cents_per_minute"] = *line->slope_cents_per_minute;
            else
                jc["slope_cents_per_minute"] = nullptr;
        } else {
            jc["slope"] = nullptr;
            jc["intercept"] = nullptr;
            jc["r2"] = nullptr;
            jc["slope_cents_per_minute"] = nullptr;
        }
        j["clusters"].push_back(jc);
    }

    j["noise"] = json::array();
    for (const auto& p : art.report.noise) j["noise"].push_back(point_json(p));

    json summary = {{"n_sentences", art.report.n_sentences},
                    {"n_significant_clusters", art.report.n_significant_clusters},
                    {"slopes", art.report.significant_slopes}};
    if (art.report.mean_slope)
        summary["mean_slope"] = *art.report.mean_slope;
    else
        summary["mean_slope"] = nullptr;
    j["summary"] = summary;

    return j.dump(2) + "\n";
}

std::string peaks_csv(const RunArtifacts& art) {
    std::string buf =
        "# sentence_index,lo_cents,hi_cents,c1,c2,c3,c4,c5,peak_cents,rmse,converged\n";
    for (const auto& [sentence, fits] : art.peaks_by_sentence) {
        for (const auto& f : fits) {
            buf += std::to_string(sentence.index);
            for (double v : {f.lo_cents, f.hi_cents, f.c1, f.c2, f.c3, f.c4, f.c5, f.peak_cents,
                             f.rmse}) {
                buf.push_back(',');
                append_csv_double(buf, v);
            }
            buf.push_back(',');
            buf += f.converged ? '1' : '0';
            buf.push_back('\n');
        }
    }
    return buf;
}

RunArtifacts run_pipeline(const PipelineConfig& cfg) {
    PitchTrack track = stage("pitch_io", [&] {
        std::ifstream in(cfg.input_path, std::ios::binary);
        if (!in) throw InputError("open: cannot read " + cfg.input_path);
        if (cfg.input_kind == InputKind::wav) {
            AudioBuffer audio = load_wav(in);
            return estimate_pitch(audio, cfg.yin);
        }
        return load_pitch_csv(in, cfg.csv_hop_hint_sec, cfg.csv_band);
    });

    RunArtifacts art = analyze_track(track, cfg);

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw InputError("report: cannot create output directory " + cfg.out_dir);

    auto write_file = [&](const std::string& name, const std::string& body) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("report: cannot write " + path.string());
        out << body;
        if (!out) throw InputError("report: short write to " + path.string());
        art.manifest.push_back(path.string());
    };

    try {
        write_file("report.json", report_json(art, cfg));
        write_file("peaks.csv", peaks_csv(art));
        std::string clusters_body;
        {
            std::ostringstream os;
            write_clusters_csv(art.report, os);
            clusters_body = os.str();
        }
        write_file("clusters.csv", clusters_body);
    } catch (...) {
        for (const auto& f : art.manifest) fs::remove(f, ec);
        throw;
    }
    return art;
}

} // namespace driftmeter
