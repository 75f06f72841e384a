#include <doctest.h>

#include <cstring>
#include <sstream>

#include "driftmeter/audio.hpp"
#include "driftmeter/errors.hpp"
#include "helpers.hpp"

using namespace driftmeter;

TEST_CASE("load_wav scales 16-bit mono samples to [-1,1]") {
    auto bytes = testutil::wav16(44100, 1, {0, 16384, -16384, 32767});
    std::istringstream in(bytes);
    AudioBuffer buf = load_wav(in);

    REQUIRE(buf.samples.size() == 4);
    CHECK(buf.sample_rate_hz == 44100);
    CHECK(buf.samples[0] == doctest::Approx(0.0));
    CHECK(buf.samples[1] == doctest::Approx(0.5));
    CHECK(buf.samples[2] == doctest::Approx(-0.5));
    CHECK(buf.samples[3] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("load_wav averages stereo channels") {
    // each frame: left = 1.0 (32767 ~ 0.99997), right = 0.0
    auto bytes = testutil::wav16(44100, 2, {32767, 0, 32767, 0, 32767, 0});
    std::istringstream in(bytes);
    AudioBuffer buf = load_wav(in);

    REQUIRE(buf.samples.size() == 3);
    for (double s : buf.samples) CHECK(s == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("load_wav rejects truncated data chunks") {
    auto bytes = testutil::wav16(44100, 1, {0, 0, 0, 0});
    bytes.resize(bytes.size() - 3); // chop into the declared data chunk
    std::istringstream in(bytes);
    CHECK_THROWS_AS(load_wav(in), InputError);
}

TEST_CASE("load_wav rejects non-RIFF input") {
    std::istringstream in("definitely not a wav file, not even close");
    CHECK_THROWS_AS(load_wav(in), InputError);
}

TEST_CASE("load_wav rejects compressed codecs") {
    auto bytes = testutil::wav16(44100, 1, {0, 0});
    bytes[20] = 0x55; // format tag -> 0x0055 (MP3)
    std::istringstream in(bytes);
    CHECK_THROWS_AS(load_wav(in), InputError);
    try {
        std::istringstream in2(bytes);
        load_wav(in2);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("wav-unsupported") != std::string::npos);
    }
}

TEST_CASE("load_wav skips unknown chunks before data") {
    auto bytes = testutil::wav16(8000, 1, {1000, -1000});
    // splice a LIST chunk between fmt and data
    std::string chunk = "LIST";
    testutil::put_u32(chunk, 4);
    chunk += "INFO";
    bytes.insert(36, chunk);
    std::istringstream in(bytes);
    AudioBuffer buf = load_wav(in);
    REQUIRE(buf.samples.size() == 2);
    CHECK(buf.samples[0] == doctest::Approx(1000.0 / 32768.0));
}

TEST_CASE("load_wav rejects sub-8kHz rates") {
    auto bytes = testutil::wav16(4000, 1, {0, 0});
    std::istringstream in(bytes);
    CHECK_THROWS_AS(load_wav(in), InputError);
}

TEST_CASE("load_wav decodes 32-bit float samples with clamping") {
    std::string data;
    for (float f : {0.25f, -0.5f, 1.5f, -2.0f}) {
        char raw[4];
        std::memcpy(raw, &f, 4);
        data.append(raw, 4);
    }
    auto bytes = testutil::wav_raw(44100, 1, 32, 3, data);
    std::istringstream in(bytes);
    AudioBuffer buf = load_wav(in);
    REQUIRE(buf.samples.size() == 4);
    CHECK(buf.samples[0] == doctest::Approx(0.25));
    CHECK(buf.samples[1] == doctest::Approx(-0.5));
    CHECK(buf.samples[2] == doctest::Approx(1.0));  // clamped
    CHECK(buf.samples[3] == doctest::Approx(-1.0)); // clamped
}

TEST_CASE("load_wav decodes 24-bit and 8-bit PCM") {
    // 24-bit: half scale positive, half scale negative
    std::string data24;
    data24 += '\x00';
    data24 += '\x00';
    data24 += '\x40'; // 0x400000 = +0.5
    data24 += '\x00';
    data24 += '\x00';
    data24 += '\xC0'; // 0xC00000 = -0.5
    auto bytes = testutil::wav_raw(16000, 1, 24, 1, data24);
    std::istringstream in(bytes);
    AudioBuffer buf = load_wav(in);
    REQUIRE(buf.samples.size() == 2);
    CHECK(buf.samples[0] == doctest::Approx(0.5));
    CHECK(buf.samples[1] == doctest::Approx(-0.5));

    // 8-bit unsigned: 128 is zero, 192 is +0.5
    std::string data8;
    data8 += static_cast<char>(128);
    data8 += static_cast<char>(192);
    auto bytes8 = testutil::wav_raw(16000, 1, 8, 1, data8);
    std::istringstream in8(bytes8);
    AudioBuffer buf8 = load_wav(in8);
    REQUIRE(buf8.samples.size() == 2);
    CHECK(buf8.samples[0] == doctest::Approx(0.0));
    CHECK(buf8.samples[1] == doctest::Approx(0.5));
}
