// rng.hpp — deterministic random source shared by simulation and training.
//
// All randomness in the project flows through this class so that a fixed
// seed reproduces bit-identical outputs across runs and platforms. Uniform
// doubles are built from the top 53 bits of the mt19937_64 stream instead
// of std::uniform_real_distribution, whose output is not pinned down by the
// standard.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mcse {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t integer(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal via Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // uniform phase in (-pi, pi]
    double phase() { return std::numbers::pi * (1.0 - 2.0 * uniform()); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mcse
