// binkernel.hpp — bit-packed binary linear algebra and its micro-benchmark.
//
// The signed dot product of +/-1 vectors is computed as
//     x . y = 2*popc(xnor(x, y)) - n
// with pad bits masked off before the popcount. Note the sign: the
// literature sometimes prints n - 2*popc(xnor), which negates the product
// under this bit encoding.
#pragma once

#include <cstdint>
#include <vector>

#include "mcse/quant.hpp"

namespace mcse {

// Signed dot product of two packed rows of true length n.
long long binary_dot(const std::uint64_t* x, const std::uint64_t* y, std::size_t n);

// C[i][j] = row_i(A) . row_j(B^T); both operands stream row-major.
std::vector<long long> binary_matmul(const PackedBitMatrix& a, const PackedBitMatrix& b_transposed);

// Reference naive single-precision matmul over the same row x row layout;
// this is the float baseline the benchmark compares against.
std::vector<float> naive_matmul_f32(const std::vector<float>& a, const std::vector<float>& b_t,
                                    std::size_t rows, std::size_t inner, std::size_t cols);

struct BenchRow {
    std::size_t size = 0;
    double time_float_ms = 0.0;
    double time_binary_ms = 0.0;
    double speedup = 0.0;
};

// Median wall-clock times over `reps` runs of square matmuls per size.
// Inputs are random +/-1 matrices; the binary result is checked against the
// float oracle once per size before timing.
std::vector<BenchRow> bench_matmul(const std::vector<std::size_t>& sizes, int reps,
                                   std::uint64_t seed = 1);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace mcse
