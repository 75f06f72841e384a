#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "driftmeter/errors.hpp"
#include "driftmeter/peaks.hpp"

using namespace driftmeter;

namespace {

Histogram from_counts(std::vector<double> counts, double origin = 0.0, double width = 5.0) {
    Histogram h;
    h.bin_width_cents = width;
    h.origin_cents = origin;
    h.counts = std::move(counts);
    double total = 0;
    for (double c : h.counts) total += c;
    h.total_frames = static_cast<long>(total);
    return h;
}

Mountain full_range(const Histogram& h) {
    Mountain m;
    m.lo_bin = 0;
    m.hi_bin = static_cast<int>(h.counts.size()) - 1;
    m.apex_bin = static_cast<int>(
        std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
    m.apex_height = h.counts[static_cast<std::size_t>(m.apex_bin)];
    return m;
}

double eq1(double x, double c1, double c2, double c3, double c4, double c5) {
    return c1 + c2 * x + c3 * std::exp(-(x - c4) * (x - c4) / c5);
}

// 41 bins of width 5 centered 5600..5800, sampled exactly from the model
Histogram model_histogram(double c1, double c2, double c3, double c4, double c5) {
    std::vector<double> counts(41);
    for (int i = 0; i < 41; ++i) counts[static_cast<std::size_t>(i)] =
        eq1(5600.0 + 5.0 * i, c1, c2, c3, c4, c5);
    return from_counts(std::move(counts), 5597.5, 5.0);
}

// independent argmax oracle: fine grid then local refinement
double argmax_oracle(double c1, double c2, double c3, double c4, double c5, double lo, double hi) {
    double best_x = lo, best_y = eq1(lo, c1, c2, c3, c4, c5);
    for (double x = lo; x <= hi; x += 0.001) {
        const double y = eq1(x, c1, c2, c3, c4, c5);
        if (y > best_y) {
            best_y = y;
            best_x = x;
        }
    }
    return best_x;
}

PeakConfig permissive() {
    PeakConfig cfg;
    cfg.min_height_frames = 0.5;
    return cfg;
}

} // namespace

TEST_CASE("find_mountains detects a single bump across its full extent") {
    Histogram h = from_counts({0, 1, 5, 1, 0});
    auto ms = find_mountains(h, permissive());
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].lo_bin == 0);
    CHECK(ms[0].hi_bin == 4);
    CHECK(ms[0].apex_bin == 2);
    CHECK(ms[0].apex_height == doctest::Approx(5.0));
}

TEST_CASE("find_mountains separates bumps at a zero valley") {
    Histogram h = from_counts({0, 5, 0, 0, 6, 0});
    auto ms = find_mountains(h, permissive());
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].apex_bin == 1);
    CHECK(ms[1].apex_bin == 4);
    CHECK(ms[0].hi_bin < ms[1].lo_bin);
}

TEST_CASE("find_mountains splits overlapping ranges at the interior minimum") {
    Histogram h = from_counts({0, 5, 3, 6, 0});
    auto ms = find_mountains(h, permissive());
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].apex_bin == 1);
    CHECK(ms[1].apex_bin == 3);
    // boundary at bin 2: left mountain keeps it, ranges stay disjoint
    CHECK(ms[0].hi_bin == 2);
    CHECK(ms[1].lo_bin == 3);
}

TEST_CASE("find_mountains yields nothing on a flat histogram") {
    Histogram h = from_counts({3, 3, 3, 3});
    CHECK(find_mountains(h, permissive()).empty());
}

TEST_CASE("find_mountains applies the height thresholds") {
    Histogram h = from_counts({0, 2, 0, 0, 50, 0});
    PeakConfig cfg; // min_height_frames 5, min_height_fraction 0.1 -> floor 5
    auto ms = find_mountains(h, cfg);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].apex_bin == 4);
}

TEST_CASE("mountains are pairwise disjoint and cover passing apexes") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> counts(60);
        for (auto& c : counts) c = std::floor(u(rng));
        Histogram h = from_counts(counts);
        auto ms = find_mountains(h, permissive());
        for (std::size_t i = 0; i < ms.size(); ++i) {
            CHECK(ms[i].lo_bin <= ms[i].apex_bin);
            CHECK(ms[i].apex_bin <= ms[i].hi_bin);
            if (i > 0) CHECK(ms[i].lo_bin > ms[i - 1].hi_bin);
        }
    }
}

TEST_CASE("fit recovers exact tilted-Gaussian data") {
    const double c1 = 2, c2 = 0.01, c3 = 100, c4 = 5700, c5 = 800;
    Histogram h = model_histogram(c1, c2, c3, c4, c5);
    PeakFit fit = fit_tilted_gaussian(h, full_range(h), permissive());

    REQUIRE(fit.converged);
    CHECK(std::abs(fit.c1 - c1) / c1 < 1e-3);
    CHECK(std::abs(fit.c2 - c2) / c2 < 1e-3);
    CHECK(std::abs(fit.c3 - c3) / c3 < 1e-3);
    CHECK(std::abs(fit.c4 - c4) / c4 < 1e-3);
    CHECK(std::abs(fit.c5 - c5) / c5 < 1e-3);

    const double oracle = argmax_oracle(c1, c2, c3, c4, c5, fit.lo_cents, fit.hi_cents);
    CHECK(std::abs(fit.peak_cents - oracle) < 0.1);
    CHECK(fit.rmse < 1e-6);
}

TEST_CASE("fit without tilt peaks exactly at the Gaussian center") {
    Histogram h = model_histogram(5, 0.0, 80, 5702.5, 600);
    PeakFit fit = fit_tilted_gaussian(h, full_range(h), permissive());
    REQUIRE(fit.converged);
    CHECK(std::abs(fit.peak_cents - fit.c4) < 1e-6);
    CHECK(fit.c4 == doctest::Approx(5702.5).epsilon(1e-6));
}

TEST_CASE("fit recovers the center within 1 cent under 1% noise (median)") {
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> uc3(20, 200), uc5(200, 2000), uc2(-0.05, 0.05),
        uc4(5660, 5740), uc1(5, 50);

    std::vector<double> errors;
    for (int trial = 0; trial < 100; ++trial) {
        const double c1 = uc1(rng), c2 = uc2(rng), c3 = uc3(rng), c4 = uc4(rng), c5 = uc5(rng);
        Histogram h = model_histogram(c1, c2, c3, c4, c5);
        std::normal_distribution<double> noise(0.0, 0.01 * c3);
        for (auto& c : h.counts) c += noise(rng);

        PeakFit fit = fit_tilted_gaussian(h, full_range(h), permissive());
        REQUIRE(fit.converged);
        errors.push_back(std::abs(fit.c4 - c4));
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[errors.size() / 2] <= 1.0);
}

TEST_CASE("fit beats the best constant model") {
    std::mt19937 rng(89);
    std::uniform_real_distribution<double> uc3(20, 200), uc5(200, 2000), uc2(-0.05, 0.05),
        uc4(5660, 5740);
    for (int trial = 0; trial < 100; ++trial) {
        const double c2 = uc2(rng), c3 = uc3(rng), c4 = uc4(rng), c5 = uc5(rng);
        Histogram h = model_histogram(10, c2, c3, c4, c5);
        std::normal_distribution<double> noise(0.0, 0.02 * c3);
        for (auto& c : h.counts) c += noise(rng);

        Mountain m = full_range(h);
        PeakFit fit = fit_tilted_gaussian(h, m, permissive());
        if (!fit.converged) continue;

        double mean = 0;
        for (double c : h.counts) mean += c;
        mean /= static_cast<double>(h.counts.size());
        double ss = 0;
        for (double c : h.counts) ss += (c - mean) * (c - mean);
        const double const_rmse = std::sqrt(ss / static_cast<double>(h.counts.size()));
        CHECK(fit.rmse <= const_rmse + 1e-9);

        // argmax consistency against every bin center
        const double peak_val = fit.eval(fit.peak_cents);
        for (int b = m.lo_bin; b <= m.hi_bin; ++b)
            CHECK(peak_val >= fit.eval(h.bin_center(static_cast<std::size_t>(b))) - 1e-9);
    }
}

TEST_CASE("fit is translation-equivariant") {
    PeakConfig cfg = permissive();
    cfg.tol = 1e-12;
    const double delta = 300.0;

    Histogram a = model_histogram(4, 0.02, 90, 5695, 900);
    Histogram b = a;
    b.origin_cents += delta;

    PeakFit fa = fit_tilted_gaussian(a, full_range(a), cfg);
    PeakFit fb = fit_tilted_gaussian(b, full_range(b), cfg);

    REQUIRE(fa.converged);
    REQUIRE(fb.converged);
    CHECK(fb.c4 - fa.c4 == doctest::Approx(delta).epsilon(1e-9));
    CHECK(fb.peak_cents - fa.peak_cents == doctest::Approx(delta).epsilon(1e-9));
    CHECK(fb.c3 == doctest::Approx(fa.c3).epsilon(1e-9));
    CHECK(fb.c5 == doctest::Approx(fa.c5).epsilon(1e-9));
    CHECK(fb.rmse == doctest::Approx(fa.rmse).epsilon(1e-6));
    CHECK(fb.c2 == doctest::Approx(fa.c2).epsilon(1e-9));
    CHECK(fb.c1 == doctest::Approx(fa.c1 - fa.c2 * delta).epsilon(1e-9));
}

TEST_CASE("fit scales linearly with the counts") {
    PeakConfig cfg = permissive();
    cfg.tol = 1e-12;
    const double k = 7.5;

    Histogram a = model_histogram(4, 0.02, 90, 5695, 900);
    Histogram b = a;
    for (auto& c : b.counts) c *= k;

    PeakFit fa = fit_tilted_gaussian(a, full_range(a), cfg);
    PeakFit fb = fit_tilted_gaussian(b, full_range(b), cfg);

    REQUIRE(fa.converged);
    REQUIRE(fb.converged);
    CHECK(fb.c1 == doctest::Approx(k * fa.c1).epsilon(1e-6));
    CHECK(fb.c2 == doctest::Approx(k * fa.c2).epsilon(1e-6));
    CHECK(fb.c3 == doctest::Approx(k * fa.c3).epsilon(1e-6));
    CHECK(fb.c4 == doctest::Approx(fa.c4).epsilon(1e-9));
    CHECK(fb.c5 == doctest::Approx(fa.c5).epsilon(1e-6));
    CHECK(fb.rmse == doctest::Approx(k * fa.rmse).epsilon(1e-6));
    CHECK(fb.peak_cents == doctest::Approx(fa.peak_cents).epsilon(1e-9));
}

TEST_CASE("narrow mountains fall back to the apex center") {
    Histogram h = from_counts({1, 4, 9, 4, 1}); // 5 bins < 6 minimum
    Mountain m = full_range(h);
    PeakFit fit = fit_tilted_gaussian(h, m, permissive());
    CHECK(fit.converged == false);
    CHECK(fit.peak_cents == doctest::Approx(h.bin_center(2)));
}

TEST_CASE("sentence_peaks finds planted notes") {
    // two notes, ~2 s each at 170 fps with +-10 cent jitter
    std::mt19937 rng(97);
    std::uniform_real_distribution<double> jitter(-10.0, 10.0);
    CentsConfig cents_cfg;

    Sentence s;
    s.index = 0;
    double t = 0.0;
    const double base = 4500.0;
    for (int note = 0; note < 2; ++note) {
        const double center = base + 200.0 * note;
        for (int i = 0; i < 340; ++i) {
            s.frames.push_back(
                PitchFrame::voiced_at(t, cents_to_hz(center + jitter(rng), cents_cfg)));
            t += 1.0 / 170.0;
        }
    }
    s.start_sec = 0.0;
    s.end_sec = t;

    auto fits = sentence_peaks(s, cents_cfg);
    REQUIRE(fits.size() == 2);
    CHECK(std::abs(fits[0].peak_cents - base) <= 3.0);
    CHECK(std::abs(fits[1].peak_cents - (base + 200.0)) <= 3.0);
    CHECK(fits[0].peak_cents < fits[1].peak_cents); // sorted ascending
}

TEST_CASE("sentence_peaks reports a single sustained note") {
    CentsConfig cents_cfg;
    Sentence s;
    s.index = 0;
    std::mt19937 rng(101);
    std::normal_distribution<double> jitter(0.0, 6.0);
    double t = 0.0;
    for (int i = 0; i < 500; ++i) {
        s.frames.push_back(PitchFrame::voiced_at(t, cents_to_hz(4700.0 + jitter(rng), {})));
        t += 1.0 / 170.0;
    }
    auto fits = sentence_peaks(s, cents_cfg);
    REQUIRE(fits.size() == 1);
    CHECK(std::abs(fits[0].peak_cents - 4700.0) <= 2.0);
}

TEST_CASE("sentence_peaks drops notes below the frame floor") {
    CentsConfig cents_cfg;
    std::mt19937 rng(103);
    std::normal_distribution<double> jitter(0.0, 6.0);

    Sentence s;
    s.index = 0;
    double t = 0.0;
    for (int i = 0; i < 400; ++i) { // strong note
        s.frames.push_back(PitchFrame::voiced_at(t, cents_to_hz(4500.0 + jitter(rng), {})));
        t += 1.0 / 170.0;
    }
    for (int i = 0; i < 3; ++i) { // 3-frame blip, below min_height_frames
        s.frames.push_back(PitchFrame::voiced_at(t, cents_to_hz(4800.0, {})));
        t += 1.0 / 170.0;
    }

    auto fits = sentence_peaks(s, cents_cfg);
    REQUIRE(fits.size() == 1);
    CHECK(std::abs(fits[0].peak_cents - 4500.0) <= 3.0);
}
