// binkernel.cpp
#include "mcse/binkernel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "mcse/rng.hpp"

namespace mcse {

long long binary_dot(const std::uint64_t* x, const std::uint64_t* y, std::size_t n) {
    const std::size_t full_words = n / 64;
    long long matches = 0;
    for (std::size_t w = 0; w < full_words; ++w)
        matches += std::popcount(~(x[w] ^ y[w]));
    const std::size_t rem = n % 64;
    if (rem) {
        std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
        matches += std::popcount(~(x[full_words] ^ y[full_words]) & mask);
    }
    return 2 * matches - static_cast<long long>(n);
}

std::vector<long long> binary_matmul(const PackedBitMatrix& a, const PackedBitMatrix& b_transposed) {
    if (a.cols != b_transposed.cols)
        throw std::invalid_argument("binary_matmul inner dimension mismatch");
    std::vector<long long> c(a.rows * b_transposed.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const std::uint64_t* ra = a.row(i);
        for (std::size_t j = 0; j < b_transposed.rows; ++j)
            c[i * b_transposed.rows + j] = binary_dot(ra, b_transposed.row(j), a.cols);
    }
    return c;
}

std::vector<float> naive_matmul_f32(const std::vector<float>& a, const std::vector<float>& b_t,
                                    std::size_t rows, std::size_t inner, std::size_t cols) {
    if (a.size() != rows * inner || b_t.size() != cols * inner)
        throw std::invalid_argument("naive_matmul_f32 shape mismatch");
    std::vector<float> c(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            float acc = 0.0f;
            const float* pa = a.data() + i * inner;
            const float* pb = b_t.data() + j * inner;
            for (std::size_t k = 0; k < inner; ++k) acc += pa[k] * pb[k];
            c[i * cols + j] = acc;
        }
    return c;
}

namespace {

double median_ms(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
double time_ms(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

std::vector<BenchRow> bench_matmul(const std::vector<std::size_t>& sizes, int reps,
                                   std::uint64_t seed) {
    if (reps <= 0) throw std::invalid_argument("reps must be positive");
    Rng rng(seed);
    std::vector<BenchRow> report;

    for (std::size_t n : sizes) {
        std::vector<double> signs_a(n * n), signs_b(n * n);
        for (double& v : signs_a) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (double& v : signs_b) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        PackedBitMatrix pa = pack_bits(signs_a, n, n);
        PackedBitMatrix pb = pack_bits(signs_b, n, n);
        std::vector<float> fa(signs_a.begin(), signs_a.end());
        std::vector<float> fb(signs_b.begin(), signs_b.end());

        // warm-up doubles as a correctness check against the float path
        std::vector<long long> cb = binary_matmul(pa, pb);
        std::vector<float> cf = naive_matmul_f32(fa, fb, n, n, n);
        for (std::size_t i = 0; i < cb.size(); ++i)
            if (static_cast<float>(cb[i]) != cf[i])
                throw std::runtime_error("binary_matmul disagrees with float oracle");

        volatile long long sink = 0;
        std::vector<double> tf, tb;
        for (int r = 0; r < reps; ++r) {
            tf.push_back(time_ms([&] {
                std::vector<float> c = naive_matmul_f32(fa, fb, n, n, n);
                sink = sink + static_cast<long long>(c[0]);
            }));
            tb.push_back(time_ms([&] {
                std::vector<long long> c = binary_matmul(pa, pb);
                sink = sink + c[0];
            }));
        }
        BenchRow row;
        row.size = n;
        row.time_float_ms = median_ms(tf);
        row.time_binary_ms = median_ms(tb);
        row.speedup = row.time_binary_ms > 0 ? row.time_float_ms / row.time_binary_ms : 0.0;
        report.push_back(row);
    }
    return report;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "size,time_float_ms,time_binary_ms,speedup\n";
    for (const BenchRow& r : rows)
        out << r.size << "," << r.time_float_ms << "," << r.time_binary_ms << "," << r.speedup
            << "\n";
    return out.str();
}

}  // namespace mcse
