// quant.cpp
#include "mcse/quant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcse {

int PrecisionSpec::bits() const {
    switch (kind) {
        case Precision::f32: return 32;
        case Precision::q2_6: return 8;
        case Precision::q2_2: return 4;
        case Precision::bin1: return 1;
    }
    return 32;
}

std::string PrecisionSpec::name() const {
    switch (kind) {
        case Precision::f32: return "f32";
        case Precision::q2_6: return "q2.6";
        case Precision::q2_2: return "q2.2";
        case Precision::bin1: return "bin1";
    }
    return "f32";
}

PrecisionSpec precision_from_name(const std::string& name) {
    if (name == "f32") return {Precision::f32};
    if (name == "q2.6" || name == "q2_6") return {Precision::q2_6};
    if (name == "q2.2" || name == "q2_2") return {Precision::q2_2};
    if (name == "bin1") return {Precision::bin1};
    throw std::invalid_argument("unknown precision: " + name);
}

int fixed_code(double x, const PrecisionSpec& spec) {
    double scaled = x / spec.step();
    // round half away from zero
    double rounded = scaled >= 0.0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    rounded = std::clamp(rounded, static_cast<double>(spec.code_min()),
                         static_cast<double>(spec.code_max()));
    return static_cast<int>(rounded);
}

double quantize_fixed(double x, const PrecisionSpec& spec) {
    return fixed_code(x, spec) * spec.step();
}

double quantize_value(double x, const PrecisionSpec& spec) {
    switch (spec.kind) {
        case Precision::f32: return x;
        case Precision::q2_6:
        case Precision::q2_2: return quantize_fixed(x, spec);
        case Precision::bin1: return binarize(x);
    }
    return x;
}

std::size_t QuantTensor::numel() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
}

QuantTensor quantize(const std::vector<double>& x, const std::vector<std::size_t>& shape,
                     const PrecisionSpec& spec) {
    QuantTensor q;
    q.shape = shape;
    q.precision = spec;
    if (q.numel() != x.size()) throw std::invalid_argument("shape does not match data size");

    switch (spec.kind) {
        case Precision::f32:
            q.f32.assign(x.begin(), x.end());
            break;
        case Precision::q2_6:
        case Precision::q2_2:
            q.codes.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                q.codes[i] = static_cast<std::int8_t>(fixed_code(x[i], spec));
            break;
        case Precision::bin1: {
            std::size_t cols = shape.empty() ? x.size() : shape.back();
            std::size_t rows = cols == 0 ? 0 : x.size() / cols;
            std::vector<double> signs(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) signs[i] = binarize(x[i]);
            q.bits = pack_bits(signs, rows, cols);
            break;
        }
    }
    return q;
}

std::vector<double> dequantize(const QuantTensor& q) {
    std::vector<double> out(q.numel());
    switch (q.precision.kind) {
        case Precision::f32:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = q.f32[i];
            break;
        case Precision::q2_6:
        case Precision::q2_2:
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = q.codes[i] * q.precision.step();
            break;
        case Precision::bin1:
            out = unpack_bits(q.bits);
            break;
    }
    return out;
}

PackedBitMatrix pack_bits(const std::vector<double>& signs, std::size_t rows, std::size_t cols) {
    if (signs.size() != rows * cols) throw std::invalid_argument("pack_bits shape mismatch");
    PackedBitMatrix p;
    p.rows = rows;
    p.cols = cols;
    p.words_per_row = (cols + 63) / 64;
    // all-ones start: padding bits beyond the row length stay +1
    p.payload.assign(rows * p.words_per_row, ~std::uint64_t{0});
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (signs[r * cols + c] < 0.0)
                p.payload[r * p.words_per_row + c / 64] &= ~(std::uint64_t{1} << (c % 64));
        }
    }
    return p;
}

std::vector<double> unpack_bits(const PackedBitMatrix& packed) {
    std::vector<double> out(packed.rows * packed.cols);
    for (std::size_t r = 0; r < packed.rows; ++r)
        for (std::size_t c = 0; c < packed.cols; ++c) {
            bool bit = (packed.payload[r * packed.words_per_row + c / 64] >> (c % 64)) & 1;
            out[r * packed.cols + c] = bit ? 1.0 : -1.0;
        }
    return out;
}

}  // namespace mcse
