#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mosr {

// xoshiro256** with splitmix64 seeding. A self-contained generator is used
// instead of <random> engines so that checkpointed state is four words and
// streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; draws two uniforms per call, no cached
    // spare, so the stream position is a pure function of the call count.
    double normal() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    std::array<std::uint64_t, 4> state() const { return state_; }
    void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

// Deterministic sub-seed derivation: fold extra coordinates into a base seed
// one splitmix64 step at a time. Used to give sweep cells and restarts
// independent, reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t base) {
    std::uint64_t x = base;
    return Rng::splitmix64(x);
}

template <typename... Rest>
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t part, Rest... rest) {
    std::uint64_t x = base ^ (part + 0x9e3779b97f4a7c15ULL);
    return derive_seed(Rng::splitmix64(x), rest...);
}

}  // namespace mosr
