// wav_io.hpp — RIFF PCM reader/writer (16-bit little-endian, interleaved).
#pragma once

#include <string>

#include "mcse/stft.hpp"

namespace mcse {

struct WavData {
    MultiSignal channels;
    double sample_rate = 16000.0;
};

// Reads 16-bit PCM RIFF files; samples are mapped to [-1, 1) by dividing by
// 32768. Anything else (float WAV, 24-bit, compressed) is rejected.
WavData read_wav(const std::string& path);

// Writes 16-bit PCM; samples are rounded and saturated to the int16 range.
void write_wav(const std::string& path, const MultiSignal& channels, double sample_rate);

}  // namespace mcse
