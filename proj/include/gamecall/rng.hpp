#pragma once

#include <cmath>
#include <cstdint>

namespace gamecall {

// xoshiro256++ with splitmix64 seeding. Self-contained so that simulated
// batches are byte-identical across compilers and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
        has_spare_ = false;
        spare_ = 0.0;
    }

    // Counter-based substream: path `stream` of a master seed gets its own
    // statistically independent state, independent of evaluation order.
    static Rng substream(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t x = master;
        std::uint64_t a = splitmix64(x);
        std::uint64_t y = stream + 0x9E3779B97F4A7C15ULL;
        std::uint64_t b = splitmix64(y);
        return Rng(a ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1]; never returns 0 so it is safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, caching the second draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t s_[4];
    bool has_spare_;
    double spare_;
};

}  // namespace gamecall
