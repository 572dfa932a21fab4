// wav_io.cpp
#include "mcse/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mcse {

namespace {

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

}  // namespace

WavData read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open wav file: " + path);

    char tag[5] = {0};
    in.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("not a RIFF file: " + path);
    read_u32(in);  // riff size
    in.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("not a WAVE file: " + path);

    std::uint16_t num_channels = 0, bits = 0, format = 0;
    std::uint32_t sample_rate = 0;
    std::vector<std::int16_t> samples;
    bool have_fmt = false, have_data = false;

    while (in && !(have_fmt && have_data)) {
        in.read(tag, 4);
        if (!in) break;
        std::uint32_t chunk_size = read_u32(in);
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            format = read_u16(in);
            num_channels = read_u16(in);
            sample_rate = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            bits = read_u16(in);
            if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::strncmp(tag, "data", 4) == 0) {
            samples.resize(chunk_size / 2);
            in.read(reinterpret_cast<char*>(samples.data()),
                    static_cast<std::streamsize>(samples.size() * 2));
            have_data = true;
        } else {
            in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
        }
    }
    if (!have_fmt || !have_data) throw std::runtime_error("missing fmt/data chunk: " + path);
    if (format != 1 || bits != 16) throw std::runtime_error("only 16-bit PCM supported: " + path);
    if (num_channels == 0) throw std::runtime_error("zero channels: " + path);

    WavData wav;
    wav.sample_rate = sample_rate;
    wav.channels.assign(num_channels, Signal(samples.size() / num_channels));
    for (std::size_t i = 0; i < samples.size() / num_channels; ++i)
        for (std::size_t m = 0; m < num_channels; ++m)
            wav.channels[m][i] = static_cast<double>(samples[i * num_channels + m]) / 32768.0;
    return wav;
}

void write_wav(const std::string& path, const MultiSignal& channels, double sample_rate) {
    if (channels.empty()) throw std::invalid_argument("no channels to write");
    const std::size_t num_samples = channels[0].size();
    for (const Signal& ch : channels)
        if (ch.size() != num_samples) throw std::invalid_argument("channel length mismatch");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write wav file: " + path);

    const std::uint16_t m = static_cast<std::uint16_t>(channels.size());
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(num_samples * m * 2);
    out.write("RIFF", 4);
    write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, m);
    write_u32(out, static_cast<std::uint32_t>(sample_rate));
    write_u32(out, static_cast<std::uint32_t>(sample_rate) * m * 2);
    write_u16(out, static_cast<std::uint16_t>(m * 2));
    write_u16(out, 16);
    out.write("data", 4);
    write_u32(out, data_bytes);

    for (std::size_t i = 0; i < num_samples; ++i) {
        for (std::size_t c = 0; c < m; ++c) {
            double v = std::round(channels[c][i] * 32768.0);
            v = std::clamp(v, -32768.0, 32767.0);
            write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
        }
    }
}

}  // namespace mcse
