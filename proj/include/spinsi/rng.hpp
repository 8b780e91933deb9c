#pragma once

#include <cstdint>
#include <random>

namespace spinsi {

// splitmix64, used to derive independent substream seeds from a root seed.
inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2fda38dccfdULL;
    return z ^ (z >> 31);
}

// Seeded random stream. Substreams are derived by hashing (seed, child index),
// so replica r of a run produces the same trajectory no matter how replicas
// are scheduled across threads.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    // Independent child stream; deterministic in (this stream's seed, idx).
    Rng split(uint64_t idx) const {
        uint64_t s = seed_ + 0x632be59bd9b4e019ULL * (idx + 1);
        return Rng(splitmix64(s));
    }

    double uniform01() { return unit_(engine_); }

    // uniform in {0, ..., n-1}
    int uniform_int(int n) {
        return static_cast<int>(std::uniform_int_distribution<long>(0, n - 1)(engine_));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    uint64_t seed() const { return seed_; }

  private:
    static std::mt19937_64 mix(uint64_t seed) {
        uint64_t s = seed;
        uint64_t a = splitmix64(s);
        uint64_t b = splitmix64(s);
        std::seed_seq seq{static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                          static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
        return std::mt19937_64(seq);
    }

    uint64_t seed_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace spinsi
