#ifndef MILKSTREAM_NUMERICS_RNG_HPP
#define MILKSTREAM_NUMERICS_RNG_HPP

#include <cstdint>
#include <random>

namespace milkstream::numerics {

// Deterministic random source. Uniform doubles are built from the top 53 bits
// of mt19937_64 output and Gaussians use the Marsaglia polar method with a
// cached second deviate, so a fixed seed gives a bit-identical stream on any
// platform. std::*_distribution is avoided on purpose: its output is
// implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n) via rejection sampling (unbiased).
    std::uint64_t next_below(std::uint64_t n);

    // Zero-mean Gaussian sample with the given standard deviation.
    // stddev == 0 returns exactly 0 and consumes no randomness.
    double gaussian(double stddev);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// splitmix64 finalizer; used to derive independent child seeds from a base
// seed plus stream indices without correlated streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace milkstream::numerics

#endif
