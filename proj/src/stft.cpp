// stft.cpp
#include "mcse/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcse {

void StftConfig::validate() const {
    if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
        throw std::invalid_argument("fft_size must be a power of two");
    if (hop == 0 || fft_size % hop != 0)
        throw std::invalid_argument("hop must divide fft_size");
    if (sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
}

ComplexSpectrogram::ComplexSpectrogram(std::size_t channels, std::size_t bins,
                                       std::size_t frames, StftConfig cfg)
    : channels_(channels), bins_(bins), frames_(frames), config_(cfg),
      data_(channels * bins * frames) {}

CVector ComplexSpectrogram::bin(std::size_t k, std::size_t t) const {
    CVector z(channels_);
    for (std::size_t m = 0; m < channels_; ++m) z[m] = at(m, k, t);
    return z;
}

void fft_inplace(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (cplx& x : a) x /= static_cast<double>(n);
}

namespace {

std::vector<double> periodic_hann(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n)));
    return w;
}

// Sum of squared analysis windows per sample position modulo hop. Constant
// for Hann at 75% overlap, but computed numerically so any hop | fft_size
// reconstructs exactly.
std::vector<double> cola_denominator(const std::vector<double>& w, std::size_t hop) {
    std::vector<double> c(hop, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) c[i % hop] += w[i] * w[i];
    return c;
}

}  // namespace

ComplexSpectrogram stft(const MultiSignal& signal, const StftConfig& cfg) {
    cfg.validate();
    if (signal.empty()) throw std::invalid_argument("no channels");
    const std::size_t len = signal[0].size();
    for (const Signal& ch : signal)
        if (ch.size() != len) throw std::invalid_argument("channel length mismatch");
    if (len < cfg.fft_size) throw std::invalid_argument("insufficient samples");

    const std::size_t n = cfg.fft_size;
    const std::size_t num_frames = (len - n) / cfg.hop + 1;
    const std::size_t num_bins = cfg.num_bins();
    const std::vector<double> window = periodic_hann(n);

    ComplexSpectrogram spec(signal.size(), num_bins, num_frames, cfg);
    std::vector<cplx> buf(n);
    for (std::size_t m = 0; m < signal.size(); ++m) {
        for (std::size_t t = 0; t < num_frames; ++t) {
            const double* x = signal[m].data() + t * cfg.hop;
            for (std::size_t i = 0; i < n; ++i) buf[i] = x[i] * window[i];
            fft_inplace(buf, false);
            for (std::size_t k = 0; k < num_bins; ++k) spec.at(m, k, t) = buf[k];
        }
    }
    return spec;
}

MultiSignal istft(const ComplexSpectrogram& spec) {
    const StftConfig& cfg = spec.config();
    cfg.validate();
    if (spec.frames() == 0) throw std::invalid_argument("empty spectrogram");
    if (spec.bins() != cfg.num_bins()) throw std::invalid_argument("bin count does not match config");

    const std::size_t n = cfg.fft_size;
    const std::size_t hop = cfg.hop;
    const std::size_t num_frames = spec.frames();
    const std::size_t len = (num_frames - 1) * hop + n;
    const std::vector<double> window = periodic_hann(n);
    const std::vector<double> cola = cola_denominator(window, hop);

    MultiSignal out(spec.channels(), Signal(len, 0.0));
    std::vector<cplx> buf(n);
    for (std::size_t m = 0; m < spec.channels(); ++m) {
        for (std::size_t t = 0; t < num_frames; ++t) {
            for (std::size_t k = 0; k < spec.bins(); ++k) buf[k] = spec.at(m, k, t);
            for (std::size_t k = spec.bins(); k < n; ++k) buf[k] = std::conj(buf[n - k]);
            fft_inplace(buf, true);
            double* y = out[m].data() + t * hop;
            for (std::size_t i = 0; i < n; ++i)
                y[i] += buf[i].real() * window[i] / cola[i % hop];
        }
    }
    return out;
}

}  // namespace mcse
