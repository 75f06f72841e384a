#include "driftmeter/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

#include "driftmeter/errors.hpp"

namespace driftmeter {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void read_exact(std::istream& in, unsigned char* buf, std::size_t n, const char* what) {
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw InputError(std::string("wav-format: truncated ") + what);
}

void skip_bytes(std::istream& in, std::uint32_t n, const char* what) {
    for (std::uint32_t left = n; left > 0;) {
        std::array<unsigned char, 4096> scratch;
        std::uint32_t chunk = std::min<std::uint32_t>(left, scratch.size());
        read_exact(in, scratch.data(), chunk, what);
        left -= chunk;
    }
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

FmtChunk parse_fmt(std::istream& in, std::uint32_t size) {
    if (size < 16) throw InputError("wav-format: fmt chunk too small");
    std::vector<unsigned char> buf(size);
    read_exact(in, buf.data(), size, "fmt chunk");

    FmtChunk fmt;
    fmt.format = read_u16(&buf[0]);
    fmt.channels = read_u16(&buf[2]);
    fmt.sample_rate = read_u32(&buf[4]);
    fmt.bits_per_sample = read_u16(&buf[14]);

    if (fmt.format == kFormatExtensible) {
        // cbSize (2) + valid bits (2) + channel mask (4) + 16-byte GUID whose
        // first two bytes are the actual format tag
        if (size < 40) throw InputError("wav-format: extensible fmt chunk too small");
        fmt.format = read_u16(&buf[24]);
    }
    return fmt;
}

double decode_sample(const unsigned char* p, std::uint16_t bits, std::uint16_t format) {
    if (format == kFormatFloat) {
        float f;
        std::memcpy(&f, p, 4);
        if (!std::isfinite(f)) return 0.0;
        return std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
    switch (bits) {
        case 8: // unsigned
            return (static_cast<int>(p[0]) - 128) / 128.0;
        case 16: {
            auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            return v / 32768.0;
        }
        case 24: {
            std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) v |= ~0xFFFFFF; // sign extend
            return v / 8388608.0;
        }
        case 32: {
            std::int32_t v;
            std::memcpy(&v, p, 4);
            return v / 2147483648.0;
        }
        default:
            throw InputError("wav-format: unsupported bit depth " + std::to_string(bits));
    }
}

} // namespace

AudioBuffer load_wav(std::istream& source) {
    unsigned char hdr[12];
    read_exact(source, hdr, sizeof hdr, "RIFF header");
    if (std::memcmp(hdr, "RIFF", 4) != 0 || std::memcmp(hdr + 8, "WAVE", 4) != 0)
        throw InputError("wav-format: not a RIFF/WAVE file");

    FmtChunk fmt;
    bool have_fmt = false;
    AudioBuffer out;

    // Walk chunks until the data chunk; anything else is skipped.
    for (;;) {
        unsigned char chdr[8];
        source.read(reinterpret_cast<char*>(chdr), 8);
        if (source.gcount() == 0) throw InputError("wav-format: missing data chunk");
        if (source.gcount() != 8) throw InputError("wav-format: truncated chunk header");
        std::uint32_t size = read_u32(chdr + 4);

        if (std::memcmp(chdr, "fmt ", 4) == 0) {
            fmt = parse_fmt(source, size);
            have_fmt = true;
        } else if (std::memcmp(chdr, "data", 4) == 0) {
            if (!have_fmt) throw InputError("wav-format: data chunk precedes fmt chunk");
            if (fmt.format != kFormatPcm && fmt.format != kFormatFloat)
                throw InputError("wav-unsupported: non-PCM codec (format tag " +
                                 std::to_string(fmt.format) + ")");
            if (fmt.format == kFormatFloat && fmt.bits_per_sample != 32)
                throw InputError("wav-unsupported: only 32-bit float supported");
            if (fmt.channels == 0) throw InputError("wav-format: zero channels");
            if (fmt.sample_rate < 8000)
                throw InputError("wav-unsupported: sample rate below 8000 Hz");

            const std::uint32_t bytes_per_sample = fmt.bits_per_sample / 8u;
            if (bytes_per_sample == 0 || fmt.bits_per_sample % 8 != 0)
                throw InputError("wav-format: bad bits per sample");
            const std::uint32_t frame_bytes = bytes_per_sample * fmt.channels;
            if (size % frame_bytes != 0)
                throw InputError("wav-format: data size not a multiple of frame size");

            const std::uint32_t n_frames = size / frame_bytes;
            out.sample_rate_hz = fmt.sample_rate;
            out.samples.resize(n_frames);

            std::vector<unsigned char> data(size);
            read_exact(source, data.data(), size, "data chunk");
            for (std::uint32_t i = 0; i < n_frames; ++i) {
                const unsigned char* frame = data.data() + static_cast<std::size_t>(i) * frame_bytes;
                double acc = 0.0;
                for (std::uint16_t c = 0; c < fmt.channels; ++c)
                    acc += decode_sample(frame + c * bytes_per_sample, fmt.bits_per_sample,
                                         fmt.format);
                out.samples[i] = acc / fmt.channels;
            }
            return out;
        } else {
            skip_bytes(source, size + (size & 1), "chunk body"); // chunks are word-aligned
            continue;
        }
        if (size & 1) skip_bytes(source, 1, "pad byte");
    }
}

} // namespace driftmeter
