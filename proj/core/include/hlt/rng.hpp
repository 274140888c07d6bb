#pragma once

#include <cmath>
#include <cstdint>

namespace hlt {

// Deterministic generator with explicit distributions so that outputs are
// identical across standard libraries and platforms (std::normal_distribution
// is implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {
        // warm up splitmix
        next_u64();
        next_u64();
    }

    // Derives an independent stream, e.g. per frame.
    static Rng sub(uint64_t seed, uint64_t stream) {
        Rng r(seed ^ (0xbf58476d1ce4e5b9ULL * (stream + 1)));
        return r;
    }

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi_inclusive) {
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi_inclusive - lo + 1));
    }

    // Box-Muller; caches the second deviate.
    double normal() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 1e-300);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(a);
        has_cache_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    uint64_t state_;
    bool has_cache_ = false;
    double cache_ = 0.0;
};

}  // namespace hlt
