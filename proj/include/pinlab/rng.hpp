#pragma once

#include <cstdint>
#include <cmath>

namespace pinlab {

// Counter-based generator: output i of a stream is a fixed 64-bit mix of
// (key, i), so streams can be replayed and skipped independently of call
// order. Distinct (seed, index) pairs give statistically independent streams.
class RngStream {
  public:
    RngStream() : key_(0), ctr_(0) {}
    explicit RngStream(std::uint64_t key) : key_(key), ctr_(0) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ull * (++ctr_)); }

    // uniform on (0,1): never returns 0 or 1
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal, Box-Muller pair with one value cached
    double normal() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(6.283185307179586476925286766559 * u2);
        double s = std::sin(6.283185307179586476925286766559 * u2);
        cache_ = r * s;
        have_cache_ = true;
        return r * c;
    }

    double exponential() { return -std::log(uniform()); }

    // UniformRandomBitGenerator interface
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }
    result_type operator()() { return next_u64(); }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

// Derive the replica stream from (master seed, replica index). Stable across
// versions: documented as mix64(mix64(seed) ^ mix64(index * golden + 1)).
inline RngStream seed_stream(std::uint64_t master_seed, std::uint64_t replica_index) {
    std::uint64_t a = RngStream::mix64(master_seed);
    std::uint64_t b = RngStream::mix64(replica_index * 0x9E3779B97F4A7C15ull + 1);
    return RngStream(RngStream::mix64(a ^ b));
}

} // namespace pinlab
