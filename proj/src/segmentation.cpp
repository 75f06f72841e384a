#include "driftmeter/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "driftmeter/errors.hpp"

namespace driftmeter {

void SegmentationConfig::validate() const {
    if (!(min_silence_sec > 0.0) || !(min_sentence_sec > 0.0) || !(fixed_len_sec > 0.0))
        throw ArgumentError("segmentation-config: all durations must be > 0");
    if (min_voiced_frames < 1)
        throw ArgumentError("segmentation-config: min_voiced_frames must be >= 1");
}

std::vector<Sentence> silence_runs(const PitchTrack& track, double min_silence_sec) {
    std::vector<Sentence> runs;
    Sentence current;
    double last_voiced_t = 0.0;

    for (const auto& f : track.frames) {
        if (!f.voiced) continue;
        if (!current.frames.empty() && f.time_sec - last_voiced_t >= min_silence_sec) {
            runs.push_back(std::move(current));
            current = Sentence{};
        }
        current.frames.push_back(f);
        last_voiced_t = f.time_sec;
    }
    if (!current.frames.empty()) runs.push_back(std::move(current));

    for (auto& r : runs) {
        r.start_sec = r.frames.front().time_sec;
        r.end_sec = r.frames.back().time_sec;
    }
    return runs;
}

std::vector<Sentence> segment_by_silence(const PitchTrack& track, const SegmentationConfig& cfg) {
    cfg.validate();
    auto runs = silence_runs(track, cfg.min_silence_sec);

    std::vector<Sentence> sentences;
    for (auto& r : runs) {
        if (r.end_sec - r.start_sec < cfg.min_sentence_sec) continue;
        if (static_cast<int>(r.frames.size()) < cfg.min_voiced_frames) continue;
        r.index = static_cast<int>(sentences.size());
        sentences.push_back(std::move(r));
    }
    return sentences;
}

std::vector<Sentence> segment_fixed(const PitchTrack& track, const SegmentationConfig& cfg) {
    cfg.validate();
    std::vector<Sentence> sentences;
    if (track.empty()) return sentences;

    const double t0 = track.start_sec();
    const double t_end = track.end_sec();
    const double len = cfg.fixed_len_sec;
    const int n_windows = static_cast<int>(std::floor((t_end - t0) / len)) + 1;

    auto it = track.frames.begin();
    for (int k = 0; k < n_windows; ++k) {
        const double lo = t0 + k * len;
        const double hi = t0 + (k + 1) * len;
        Sentence s;
        s.start_sec = lo;
        s.end_sec = std::min(hi, t_end);
        for (; it != track.frames.end() && it->time_sec < hi; ++it)
            if (it->voiced) s.frames.push_back(*it);
        // a frame sitting exactly at t_end belongs to the last window
        if (k == n_windows - 1)
            for (; it != track.frames.end(); ++it)
                if (it->voiced) s.frames.push_back(*it);
        if (static_cast<int>(s.frames.size()) < cfg.min_voiced_frames) continue;
        if (!(s.start_sec < s.end_sec)) continue;
        s.index = static_cast<int>(sentences.size());
        sentences.push_back(std::move(s));
    }
    return sentences;
}

} // namespace driftmeter
