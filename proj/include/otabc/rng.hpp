#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace otabc {

// One SplitMix64 step. Used to turn (seed, stream) pairs into well-spread
// engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent sub-seed for a named piece of work under a global seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ull + salt * 0xd1342543de82ef95ull);
    return splitmix64(s);
}

// Deterministic random stream addressed by (seed, stream index).
//
// Every draw/worker owns its own stream, so results never depend on thread
// scheduling. The uniform and normal transforms are implemented here rather
// than taken from <random> distributions because the standard leaves those
// algorithms implementation-defined; with a fixed engine (mt19937_64, fully
// specified) this makes every sequence reproducible across toolchains.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
        engine_.seed(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via the Box-Muller cosine branch (two engine words per
    // variate, no state carried between calls).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * 3.14159265358979323846 * uniform01();
        return r * std::cos(a);
    }

    // Uniform index in [0, n), multiply-shift bound (n >= 1).
    std::size_t index(std::size_t n) {
        using u128 = unsigned __int128;
        return static_cast<std::size_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace otabc
