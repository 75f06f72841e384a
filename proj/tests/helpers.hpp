#pragma once

// Shared builders for the test suites: in-memory WAV bytes, synthetic
// sines, and small pitch tracks.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driftmeter/audio.hpp"
#include "driftmeter/pitch_io.hpp"

namespace testutil {

inline void put_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
    s.push_back(static_cast<char>((v >> 16) & 0xFF));
    s.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

// Minimal PCM16 WAV byte blob; `frames` holds interleaved channel samples.
inline std::string wav16(std::uint32_t rate, std::uint16_t channels,
                         const std::vector<std::int16_t>& interleaved) {
    std::string data;
    for (std::int16_t v : interleaved) put_u16(data, static_cast<std::uint16_t>(v));

    std::string s = "RIFF";
    put_u32(s, static_cast<std::uint32_t>(36 + data.size()));
    s += "WAVEfmt ";
    put_u32(s, 16);
    put_u16(s, 1); // PCM
    put_u16(s, channels);
    put_u32(s, rate);
    put_u32(s, rate * channels * 2);
    put_u16(s, static_cast<std::uint16_t>(channels * 2));
    put_u16(s, 16);
    s += "data";
    put_u32(s, static_cast<std::uint32_t>(data.size()));
    s += data;
    return s;
}

// WAV blob with an arbitrary sample payload already encoded; takes the raw
// data-chunk bytes plus the fmt fields.
inline std::string wav_raw(std::uint32_t rate, std::uint16_t channels, std::uint16_t bits,
                           std::uint16_t format_tag, const std::string& data) {
    std::string s = "RIFF";
    put_u32(s, static_cast<std::uint32_t>(36 + data.size()));
    s += "WAVEfmt ";
    put_u32(s, 16);
    put_u16(s, format_tag);
    put_u16(s, channels);
    put_u32(s, rate);
    put_u32(s, rate * channels * bits / 8);
    put_u16(s, static_cast<std::uint16_t>(channels * bits / 8));
    put_u16(s, bits);
    s += "data";
    put_u32(s, static_cast<std::uint32_t>(data.size()));
    s += data;
    return s;
}

inline driftmeter::AudioBuffer sine(double freq_hz, double seconds, std::uint32_t rate = 44100,
                                    double amplitude = 0.8) {
    driftmeter::AudioBuffer buf;
    buf.sample_rate_hz = rate;
    const auto n = static_cast<std::size_t>(seconds * rate);
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        buf.samples[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) / rate);
    return buf;
}

inline double cents_error(double f_est, double f_true) {
    return 1200.0 * std::log2(f_est / f_true);
}

// Voiced frames at hop spacing covering [t0, t0+dur) at a constant f0.
inline void append_voiced(driftmeter::PitchTrack& track, double t0, double dur, double f0,
                          double hop) {
    const auto n = static_cast<long>(std::round(dur / hop));
    for (long k = 0; k < n; ++k)
        track.frames.push_back(driftmeter::PitchFrame::voiced_at(t0 + k * hop, f0));
}

inline void append_unvoiced(driftmeter::PitchTrack& track, double t0, double dur, double hop) {
    const auto n = static_cast<long>(std::round(dur / hop));
    for (long k = 0; k < n; ++k)
        track.frames.push_back(driftmeter::PitchFrame::unvoiced_at(t0 + k * hop));
}

} // namespace testutil
