// test_stft.cpp — STFT/iSTFT unit tests.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mcse/rng.hpp"
#include "mcse/stft.hpp"

using namespace mcse;

namespace {

Signal white_noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Signal x(n);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

StftConfig small_cfg() { return {256, 64, 16000.0}; }

}  // namespace

TEST_CASE("config invariants") {
    StftConfig cfg;
    CHECK(cfg.num_bins() == 513);
    CHECK(cfg.hop * 4 == cfg.fft_size);  // 75% overlap
    cfg.validate();

    StftConfig bad{1000, 250, 16000.0};
    CHECK_THROWS(bad.validate());
    StftConfig bad_hop{256, 96, 16000.0};
    CHECK_THROWS(bad_hop.validate());
}

TEST_CASE("zero signal gives zero spectrogram") {
    MultiSignal x(2, Signal(1000, 0.0));
    ComplexSpectrogram spec = stft(x, small_cfg());
    CHECK(spec.channels() == 2);
    CHECK(spec.frames() == (1000 - 256) / 64 + 1);
    for (const cplx& v : spec.raw()) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("250 Hz sine peaks at bin 16 with fft 1024") {
    StftConfig cfg;  // 1024/256 @ 16 kHz
    Signal x(4096);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(2.0 * std::numbers::pi * 250.0 * static_cast<double>(i) / 16000.0);
    ComplexSpectrogram spec = stft({x}, cfg);
    // 250 * 1024 / 16000 = 16 exactly
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 0; k < spec.bins(); ++k) {
        double m = std::abs(spec.at(0, k, 2));
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    CHECK(best == 16);
    // windowed full-bin sine: |X| = N/2 * mean(window) = N/4 for Hann
    CHECK(best_mag == doctest::Approx(1024.0 / 4.0).epsilon(1e-9));
}

TEST_CASE("round trip is exact on interior samples") {
    StftConfig cfg = small_cfg();
    Signal x = white_noise(8000, 7);
    ComplexSpectrogram spec = stft({x}, cfg);
    MultiSignal y = istft(spec);
    double max_err = 0.0;
    for (std::size_t i = cfg.fft_size; i + cfg.fft_size < x.size(); ++i)
        max_err = std::max(max_err, std::abs(y[0][i] - x[i]));
    CHECK(max_err < 1e-10);
}

TEST_CASE("istft errors and trivial cases") {
    CHECK_THROWS_WITH(stft({Signal(100, 0.0)}, small_cfg()),
                      doctest::Contains("insufficient samples"));

    ComplexSpectrogram zero(1, small_cfg().num_bins(), 4, small_cfg());
    MultiSignal y = istft(zero);
    for (double v : y[0]) CHECK(v == 0.0);

    ComplexSpectrogram empty(1, small_cfg().num_bins(), 0, small_cfg());
    CHECK_THROWS(istft(empty));
}

TEST_CASE("single frame synthesis matches a hand DFT at size 8") {
    // spectrum e^{-i pi k} = (-1)^k puts the impulse at the frame centre
    StftConfig cfg{8, 2, 16000.0};
    ComplexSpectrogram spec(1, 5, 1, cfg);
    for (std::size_t k = 0; k < 5; ++k)
        spec.at(0, k, 0) = (k % 2 == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);

    // inverse DFT by direct summation of the conjugate-symmetric spectrum
    Signal expected_frame(8, 0.0);
    for (int n = 0; n < 8; ++n) {
        cplx acc = 0.0;
        for (int k = 0; k < 8; ++k) {
            int ks = k <= 4 ? k : k - 8;  // conjugate symmetry of real signals
            cplx coeff = (std::abs(ks) % 2 == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
            double ang = 2.0 * std::numbers::pi * k * n / 8.0;
            acc += coeff * cplx(std::cos(ang), std::sin(ang));
        }
        expected_frame[static_cast<std::size_t>(n)] = acc.real() / 8.0;
    }
    // synthesis applies window / cola
    std::vector<double> w(8), cola(2, 0.0);
    for (int i = 0; i < 8; ++i)
        w[static_cast<std::size_t>(i)] =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / 8.0));
    for (int i = 0; i < 8; ++i) cola[static_cast<std::size_t>(i % 2)] += w[i] * w[i];

    MultiSignal y = istft(spec);
    REQUIRE(y[0].size() == 8);
    for (std::size_t n = 0; n < 8; ++n)
        CHECK(y[0][n] ==
              doctest::Approx(expected_frame[n] * w[n] / cola[n % 2]).epsilon(1e-12));
    // the impulse itself sits at the frame centre
    std::size_t peak = 0;
    for (std::size_t n = 1; n < 8; ++n)
        if (std::abs(y[0][n]) > std::abs(y[0][peak])) peak = n;
    CHECK(peak == 4);
}

TEST_CASE("linearity") {
    StftConfig cfg = small_cfg();
    Signal x = white_noise(2000, 1), y = white_noise(2000, 2);
    Signal mix(2000);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * x[i] - 0.5 * y[i];
    ComplexSpectrogram sx = stft({x}, cfg), sy = stft({y}, cfg), sm = stft({mix}, cfg);
    double max_err = 0.0;
    for (std::size_t i = 0; i < sm.raw().size(); ++i)
        max_err = std::max(max_err, std::abs(sm.raw()[i] - (2.5 * sx.raw()[i] - 0.5 * sy.raw()[i])));
    CHECK(max_err < 1e-12);
}

TEST_CASE("Parseval consistency per frame") {
    StftConfig cfg = small_cfg();
    Signal x = white_noise(1024, 3);
    ComplexSpectrogram spec = stft({x}, cfg);

    // recompute the windowed frame energy in time domain
    std::vector<double> w(cfg.fft_size);
    for (std::size_t i = 0; i < cfg.fft_size; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(cfg.fft_size)));
    for (std::size_t t = 0; t < spec.frames(); ++t) {
        double time_energy = 0.0;
        for (std::size_t i = 0; i < cfg.fft_size; ++i) {
            double v = x[t * cfg.hop + i] * w[i];
            time_energy += v * v;
        }
        double spec_energy = std::norm(spec.at(0, 0, t)) + std::norm(spec.at(0, spec.bins() - 1, t));
        for (std::size_t k = 1; k + 1 < spec.bins(); ++k)
            spec_energy += 2.0 * std::norm(spec.at(0, k, t));
        spec_energy /= static_cast<double>(cfg.fft_size);
        CHECK(time_energy == doctest::Approx(spec_energy).epsilon(1e-9));
    }
}
