#pragma once

#include <cstdint>
#include <istream>
#include <vector>

namespace driftmeter {

// Mono audio, samples normalized to [-1, 1].
struct AudioBuffer {
    std::uint32_t sample_rate_hz = 0;
    std::vector<double> samples;

    double duration_sec() const {
        return sample_rate_hz ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

// Reads a RIFF PCM WAV stream (8/16/24/32-bit integer or 32-bit float,
// any channel count). Multi-channel input is mixed down by averaging.
// Throws InputError on malformed headers, truncated data or non-PCM codecs.
AudioBuffer load_wav(std::istream& source);

} // namespace driftmeter
