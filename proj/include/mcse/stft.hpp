// stft.hpp — multi-channel STFT/iSTFT with exact-reconstruction overlap-add.
#pragma once

#include <cstddef>
#include <vector>

#include "mcse/linalg.hpp"

namespace mcse {

// One channel of time-domain audio.
using Signal = std::vector<double>;
// M channels, equal length.
using MultiSignal = std::vector<Signal>;

struct StftConfig {
    std::size_t fft_size = 1024;
    std::size_t hop = 256;  // fft_size/4 gives the 75% overlap used throughout
    double sample_rate = 16000.0;

    std::size_t num_bins() const { return fft_size / 2 + 1; }
    double bin_frequency(std::size_t k) const {
        return static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
    }
    // throws if fft_size is not a power of two or hop does not divide it
    void validate() const;
};

// M x K x T complex tensor, the signal currency of the whole pipeline.
class ComplexSpectrogram {
  public:
    ComplexSpectrogram() = default;
    ComplexSpectrogram(std::size_t channels, std::size_t bins, std::size_t frames,
                       StftConfig cfg = {});

    std::size_t channels() const { return channels_; }
    std::size_t bins() const { return bins_; }
    std::size_t frames() const { return frames_; }
    const StftConfig& config() const { return config_; }

    cplx& at(std::size_t m, std::size_t k, std::size_t t) {
        return data_[(m * bins_ + k) * frames_ + t];
    }
    const cplx& at(std::size_t m, std::size_t k, std::size_t t) const {
        return data_[(m * bins_ + k) * frames_ + t];
    }

    // M-vector Z(k,t) across channels
    CVector bin(std::size_t k, std::size_t t) const;

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

  private:
    std::size_t channels_ = 0, bins_ = 0, frames_ = 0;
    StftConfig config_;
    std::vector<cplx> data_;
};

// Periodic Hann analysis of every channel. Frame t starts at sample t*hop;
// T = floor((len - fft_size)/hop) + 1. Throws "insufficient samples" when the
// signal is shorter than one frame.
ComplexSpectrogram stft(const MultiSignal& signal, const StftConfig& cfg);

// Weighted overlap-add inverse; exact on samples with full window coverage.
MultiSignal istft(const ComplexSpectrogram& spec);

// In-place radix-2 FFT used by the transforms above; n must be a power of
// two. Exposed for the handful of places that need a raw transform.
void fft_inplace(std::vector<cplx>& a, bool inverse);

}  // namespace mcse
