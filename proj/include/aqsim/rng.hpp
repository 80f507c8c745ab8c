#pragma once

#include <cstdint>
#include <cmath>

// Counter-based randomness: draw(seed, id, step, slot) is a pure function,
// so ensembles advanced in parallel produce schedule-independent streams.

namespace aqsim::rng {

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t draw(std::uint64_t seed, std::uint64_t id,
                          std::uint64_t step, std::uint64_t slot = 0) {
    std::uint64_t h = mix(seed ^ 0x8f1bbcdcbfa53e0bULL);
    h = mix(h + 0x2545f4914f6cdd1dULL * id);
    h = mix(h + 0x27220a95fe4d27d5ULL * step);
    h = mix(h + 0x9e6c63d0876a68e5ULL * slot);
    return h;
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t bits, double lo, double hi) {
    return lo + (hi - lo) * uniform01(bits);
}

// Index in [0, n).
inline std::size_t pick(std::uint64_t bits, std::size_t n) {
    return static_cast<std::size_t>(uniform01(bits) * static_cast<double>(n)) % n;
}

// Stateful convenience wrapper over the counter scheme; `id` names the
// logical stream, the counter advances per draw.
class stream {
public:
    stream(std::uint64_t seed, std::uint64_t id = 0) : seed_(seed), id_(id) {}

    std::uint64_t next_u64() { return draw(seed_, id_, counter_++); }
    double next_uniform01() { return uniform01(next_u64()); }
    double next_uniform(double lo, double hi) { return uniform(next_u64(), lo, hi); }
    std::size_t next_index(std::size_t n) { return pick(next_u64(), n); }

    double next_exponential(double rate) {
        double u = next_uniform01();
        return -std::log1p(-u) / rate;
    }

private:
    std::uint64_t seed_;
    std::uint64_t id_;
    std::uint64_t counter_ = 0;
};

} // namespace aqsim::rng
