// quant.hpp — precision specs, fixed-point quantizers, binarization and
// bit-packing shared by the kernels, inference and training.
//
// Conventions pinned here and used everywhere else:
//   * rounding is half away from zero, saturating (never throws),
//   * sign(0) = +1,
//   * packed bits are row-major, LSB-first within 64-bit words, +1 -> 1,
//     -1 -> 0, row padding bits set to 1.
#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace mcse {

enum class Precision : std::uint8_t { f32 = 0, q2_6 = 1, q2_2 = 2, bin1 = 3 };

struct PrecisionSpec {
    Precision kind = Precision::f32;

    // fixed-point step; meaningless for f32/bin1
    double step() const { return kind == Precision::q2_6 ? 0x1.0p-6 : 0x1.0p-2; }
    int bits() const;
    // smallest/largest representable code for the fixed-point kinds
    int code_min() const { return -(1 << (bits() - 1)); }
    int code_max() const { return (1 << (bits() - 1)) - 1; }
    double value_min() const { return code_min() * step(); }
    double value_max() const { return code_max() * step(); }
    bool fixed_point() const { return kind == Precision::q2_6 || kind == Precision::q2_2; }

    std::string name() const;
};

PrecisionSpec precision_from_name(const std::string& name);  // "f32" "q2.6" "q2.2" "bin1"

// Saturating fixed-point quantization of one value: returns the nearest
// representable value (round half away from zero, clamped to the code range).
double quantize_fixed(double x, const PrecisionSpec& spec);
int fixed_code(double x, const PrecisionSpec& spec);

// sign with sign(0) = +1; the single source of truth for bin1
inline double binarize(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Applies the spec to one value: identity for f32, quantize_fixed for the
// fixed-point formats, binarize for bin1.
double quantize_value(double x, const PrecisionSpec& spec);

struct PackedBitMatrix {
    std::size_t rows = 0, cols = 0;
    std::size_t words_per_row = 0;
    std::vector<std::uint64_t> payload;  // rows * words_per_row

    const std::uint64_t* row(std::size_t r) const { return payload.data() + r * words_per_row; }
};

struct QuantTensor {
    std::vector<std::size_t> shape;
    PrecisionSpec precision;
    std::vector<float> f32;        // f32 payload
    std::vector<std::int8_t> codes;  // fixed-point payload
    PackedBitMatrix bits;          // bin1 payload (rows = outer dims, cols = last dim)
    std::vector<float> scale;      // per-gate recurrent scales for bin1 matrices

    std::size_t numel() const;
};

QuantTensor quantize(const std::vector<double>& x, const std::vector<std::size_t>& shape,
                     const PrecisionSpec& spec);
std::vector<double> dequantize(const QuantTensor& q);

// signs must contain only +1/-1
PackedBitMatrix pack_bits(const std::vector<double>& signs, std::size_t rows, std::size_t cols);
std::vector<double> unpack_bits(const PackedBitMatrix& packed);

}  // namespace mcse
