#include <doctest.h>

#include <cmath>
#include <random>

#include "driftmeter/errors.hpp"
#include "driftmeter/pitch_io.hpp"
#include "helpers.hpp"

using namespace driftmeter;

TEST_CASE("estimate_pitch nails a 440 Hz sine within 2 cents") {
    auto audio = testutil::sine(440.0, 1.0);
    PitchTrack t = estimate_pitch(audio);

    const int expected_frames = (static_cast<int>(audio.samples.size()) - 2048) / 256 + 1;
    CHECK(static_cast<int>(t.frames.size()) == expected_frames);

    int voiced_ok = 0, interior = 0;
    for (std::size_t i = 1; i + 1 < t.frames.size(); ++i) {
        ++interior;
        const auto& f = t.frames[i];
        if (f.voiced && std::abs(testutil::cents_error(f.f0_hz, 440.0)) <= 2.0) ++voiced_ok;
    }
    CHECK(voiced_ok == interior);
}

TEST_CASE("estimate_pitch leaves silence unvoiced") {
    AudioBuffer audio;
    audio.sample_rate_hz = 44100;
    audio.samples.assign(44100, 0.0);
    PitchTrack t = estimate_pitch(audio);
    for (const auto& f : t.frames) CHECK(f.voiced == false);
}

TEST_CASE("estimate_pitch picks the fundamental of a harmonic signal") {
    // 100 Hz plus its third harmonic at half amplitude
    AudioBuffer audio;
    audio.sample_rate_hz = 44100;
    audio.samples.resize(44100);
    for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        const double t = static_cast<double>(i) / 44100.0;
        audio.samples[i] = 0.5 * std::sin(2 * M_PI * 100.0 * t) +
                           0.25 * std::sin(2 * M_PI * 300.0 * t);
    }
    PitchTrack t = estimate_pitch(audio);
    int ok = 0, total = 0;
    for (std::size_t i = 1; i + 1 < t.frames.size(); ++i) {
        ++total;
        const auto& f = t.frames[i];
        if (f.voiced && std::abs(testutil::cents_error(f.f0_hz, 100.0)) <= 5.0) ++ok;
    }
    CHECK(ok == total);
}

TEST_CASE("estimate_pitch rejects audio shorter than one frame") {
    AudioBuffer audio;
    audio.sample_rate_hz = 44100;
    audio.samples.assign(1000, 0.1);
    CHECK_THROWS_AS(estimate_pitch(audio), InputError);
}

TEST_CASE("estimate_pitch validates its configuration") {
    AudioBuffer audio = testutil::sine(200.0, 0.2);

    YinConfig bad = {};
    bad.hop_size = 4096; // hop > frame
    CHECK_THROWS_AS(estimate_pitch(audio, bad), ArgumentError);

    bad = {};
    bad.threshold = 1.5;
    CHECK_THROWS_AS(estimate_pitch(audio, bad), ArgumentError);

    bad = {};
    bad.f0_min_hz = 500.0;
    bad.f0_max_hz = 100.0;
    CHECK_THROWS_AS(estimate_pitch(audio, bad), ArgumentError);

    // the frame must hold at least two periods of f0_min
    bad = {};
    bad.frame_size = 512;
    bad.hop_size = 128;
    bad.f0_min_hz = 60.0;
    CHECK_THROWS_AS(estimate_pitch(audio, bad), ArgumentError);
}

TEST_CASE("estimate_pitch frame count follows the hop formula") {
    for (int extra : {0, 1, 255, 256, 1000}) {
        AudioBuffer audio;
        audio.sample_rate_hz = 44100;
        audio.samples.assign(static_cast<std::size_t>(4096 + extra), 0.0);
        PitchTrack t = estimate_pitch(audio);
        const int expected = (4096 + extra - 2048) / 256 + 1;
        CHECK(static_cast<int>(t.frames.size()) == expected);
    }
}

TEST_CASE("estimate_pitch stays accurate across the vocal band") {
    // property: random frequencies, >=99% of interior frames within 2 cents
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pick(80.0, 1000.0);
    for (int trial = 0; trial < 8; ++trial) {
        const double f_true = pick(rng);
        auto audio = testutil::sine(f_true, 0.6);
        PitchTrack t = estimate_pitch(audio);

        int good = 0, interior = 0;
        for (std::size_t i = 1; i + 1 < t.frames.size(); ++i) {
            ++interior;
            const auto& f = t.frames[i];
            if (f.voiced && std::abs(testutil::cents_error(f.f0_hz, f_true)) <= 2.0) ++good;
        }
        INFO("f = ", f_true);
        CHECK(good >= static_cast<int>(std::ceil(0.99 * interior)));
    }
}

TEST_CASE("estimate_pitch never reports f0 outside the configured band") {
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.3);
    AudioBuffer audio;
    audio.sample_rate_hz = 44100;
    audio.samples.resize(44100 / 2);
    for (auto& s : audio.samples) s = std::clamp(noise(rng), -1.0, 1.0);

    YinConfig cfg;
    cfg.f0_min_hz = 100.0;
    cfg.f0_max_hz = 400.0;
    PitchTrack t = estimate_pitch(audio, cfg);
    for (const auto& f : t.frames) {
        if (!f.voiced) continue;
        CHECK(f.f0_hz >= 100.0);
        CHECK(f.f0_hz <= 400.0);
    }
}
