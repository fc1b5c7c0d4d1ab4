// Deterministic seeded random streams (splitmix64 based).
//
// Every stochastic quantity in the library (channel coefficients, delta
// stream factors, weighting matrices, Monte Carlo trials) is drawn from a
// substream derived from a single master seed, so results are bit-identical
// across runs, platforms, and thread counts.
#pragma once

#include <cmath>
#include <cstdint>

namespace ria {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named substream tags. The mixing is not cryptographic; it only needs to
// decorrelate streams drawn from the same master seed.
enum class Stream : std::uint64_t {
    Channel = 0x11,
    Delta = 0x22,
    Gamma = 0x33,
    Trial = 0x44,
    Generic = 0x55,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= (a + 1) * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= (b + 1) * 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64(s);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ria
