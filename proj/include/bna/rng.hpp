#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bna {

// Spreads a master seed across stream ids so per-agent / per-cluster streams
// with small consecutive ids do not start in correlated states.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// PCG32 (O'Neill): 64-bit LCG state with a 32-bit permuted output. One
// independent stream per (seed, stream) pair; every draw is reproducible
// across platforms, which std::normal_distribution does not guarantee.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream)
        : state_(0), inc_((stream << 1u) | 1u) {
        next();
        state_ += splitmix64(seed ^ (stream * 0x9e3779b97f4a7c15ULL));
        next();
    }

    std::uint32_t next() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next();
        return (hi << 32) | next();
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform heading on (-pi, pi]; u = 0 maps to +pi.
    double angle() {
        return std::numbers::pi - 2.0 * std::numbers::pi * uniform01();
    }

    // +1 or -1 with equal probability.
    double sign() {
        return (next() >> 31) ? 1.0 : -1.0;
    }

    // Standard normal via Box-Muller. No caching of the second variate: one
    // draw consumes exactly two 64-bit uniforms, which keeps stream state a
    // pure function of the draw count.
    double normal() {
        double u1 = uniform01_open_low();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// Stream-id bases. Keeping the constants in one place guarantees distinct
// sub-streams never collide between subsystems of the same run.
namespace streams {
inline constexpr std::uint64_t kAgentBase = 0x1000;
inline constexpr std::uint64_t kClusterBase = 0x100;   // member placement draws
inline constexpr std::uint64_t kClusterOps = 0x200;    // checkout draws
inline constexpr std::uint64_t kPayload = 0x9;
}  // namespace streams

}  // namespace bna
