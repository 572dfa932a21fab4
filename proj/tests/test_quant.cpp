// test_quant.cpp — fixed-point quantizer and bit-packing tests.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mcse/quant.hpp"
#include "mcse/rng.hpp"

using namespace mcse;

TEST_CASE("precision spec constants") {
    PrecisionSpec q6{Precision::q2_6};
    CHECK(q6.step() == 1.0 / 64.0);
    CHECK(q6.bits() == 8);
    CHECK(q6.step() * (1 << (q6.bits() - 1)) == 2.0);  // step * 2^(bits-1) = 2
    CHECK(q6.value_min() == -2.0);
    CHECK(q6.value_max() == doctest::Approx(127.0 / 64.0));

    PrecisionSpec q2{Precision::q2_2};
    CHECK(q2.step() == 0.25);
    CHECK(q2.bits() == 4);
    CHECK(q2.step() * (1 << (q2.bits() - 1)) == 2.0);
    CHECK(q2.value_max() == doctest::Approx(1.75));
}

TEST_CASE("q2.6 scalar examples") {
    PrecisionSpec q6{Precision::q2_6};
    CHECK(fixed_code(0.5, q6) == 32);
    CHECK(quantize_fixed(0.5, q6) == 0.5);  // representable exactly
    CHECK(fixed_code(1.23, q6) == 79);      // round(78.72)
    CHECK(quantize_fixed(1.23, q6) == doctest::Approx(1.234375));
    CHECK(fixed_code(3.0, q6) == 127);  // saturates
    CHECK(quantize_fixed(3.0, q6) == doctest::Approx(1.984375));
    CHECK(fixed_code(-3.0, q6) == -128);
}

TEST_CASE("q2.2 scalar examples") {
    PrecisionSpec q2{Precision::q2_2};
    CHECK(fixed_code(0.6, q2) == 2);  // round(2.4)
    CHECK(quantize_fixed(0.6, q2) == 0.5);
    // half away from zero
    CHECK(fixed_code(0.125, q2) == 1);
    CHECK(fixed_code(-0.125, q2) == -1);
}

TEST_CASE("binarization convention") {
    CHECK(binarize(0.0) == 1.0);  // sign(0) = +1
    CHECK(binarize(-0.0) == 1.0);
    CHECK(binarize(1e-300) == 1.0);
    CHECK(binarize(-1e-300) == -1.0);
}

TEST_CASE("dequantize is the exact inverse on codes") {
    PrecisionSpec q6{Precision::q2_6};
    std::vector<double> vals;
    for (int code = -128; code <= 127; ++code) vals.push_back(code * q6.step());
    QuantTensor q = quantize(vals, {vals.size()}, q6);
    std::vector<double> back = dequantize(q);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(back[i] == vals[i]);
    CHECK(back[128] == 0.0);  // code 0 -> 0.0
}

TEST_CASE("quantization error bound, monotonicity, idempotence") {
    Rng rng(11);
    for (PrecisionSpec spec : {PrecisionSpec{Precision::q2_6}, PrecisionSpec{Precision::q2_2}}) {
        double prev_x = -10.0, prev_q = quantize_fixed(prev_x, spec);
        for (int i = 0; i < 20000; ++i) {
            double x = rng.uniform(-2.0, spec.value_max());
            double q = quantize_fixed(x, spec);
            CHECK(std::abs(q - x) <= spec.step() / 2.0 + 1e-15);
            CHECK(quantize_fixed(q, spec) == q);  // idempotent
            // monotonic: compare against a second draw
            double y = rng.uniform(-2.5, 2.5);
            double qy = quantize_fixed(y, spec);
            if (x <= y) CHECK(q <= qy);
            else CHECK(q >= qy);
            (void)prev_q;
        }
    }
}

TEST_CASE("bin1 tensor round trip") {
    std::vector<double> x = {0.3, -0.7, 0.0, -2.5, 1.9, -0.1};
    QuantTensor q = quantize(x, {2, 3}, PrecisionSpec{Precision::bin1});
    std::vector<double> back = dequantize(q);
    std::vector<double> expect = {1, -1, 1, -1, 1, -1};
    CHECK(back == expect);
}

TEST_CASE("pack_bits word layout") {
    std::vector<double> ones(64, 1.0);
    PackedBitMatrix p = pack_bits(ones, 1, 64);
    CHECK(p.words_per_row == 1);
    CHECK(p.payload[0] == ~std::uint64_t{0});

    std::vector<double> alt(64);
    for (std::size_t i = 0; i < 64; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    PackedBitMatrix pa = pack_bits(alt, 1, 64);
    CHECK(pa.payload[0] == 0x5555555555555555ULL);  // LSB first, +1 -> 1
}

TEST_CASE("padding bits stay one") {
    std::vector<double> x(10, -1.0);
    PackedBitMatrix p = pack_bits(x, 1, 10);
    CHECK(p.words_per_row == 1);
    CHECK((p.payload[0] & ((std::uint64_t{1} << 10) - 1)) == 0);
    CHECK((p.payload[0] >> 10) == (~std::uint64_t{0} >> 10));
}

TEST_CASE("unpack(pack(x)) = x") {
    Rng rng(5);
    std::vector<double> signs(7 * 77);
    for (double& v : signs) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    PackedBitMatrix p = pack_bits(signs, 7, 77);
    CHECK(unpack_bits(p) == signs);
}
