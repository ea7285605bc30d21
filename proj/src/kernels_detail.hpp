#pragma once

// Shared scalar core for the concentration kernels. Both translation units
// (plain scalar and AVX2) include this header: the scalar backend wraps these
// functions directly and the AVX2 backend uses them for loop tails, so tail
// lanes and full lanes agree bit for bit by construction.
//
// The exp implementation is a standard Cody-Waite range reduction with a
// degree-13 Taylor polynomial evaluated by FMA Horner steps. Every operation
// here is an IEEE-754 correctly-rounded primitive with a direct one-to-one
// AVX2 counterpart:
//   std::nearbyint  <->  _mm256_round_pd (nearest-even)
//   std::fma        <->  _mm256_fmadd_pd
//   std::floor      <->  _mm256_floor_pd
//   * + -           <->  mul/add/sub pd
// The 2^k scaling is performed as two exact power-of-two multiplies so that
// results that underflow into the subnormal range round exactly once, in the
// same place on both paths.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bna::kernels::detail {

inline constexpr double kLog2E = 1.44269504088896340736;      // 1/ln 2
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // ln 2, high 32 bits
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;  // ln 2 - kLn2Hi
inline constexpr double kOverflowX = 709.782712893383973096;
inline constexpr double kUnderflowX = -745.133219101941108420;

// 1/2! .. 1/13!
inline constexpr double kC2 = 5.00000000000000000000e-01;
inline constexpr double kC3 = 1.66666666666666666667e-01;
inline constexpr double kC4 = 4.16666666666666666667e-02;
inline constexpr double kC5 = 8.33333333333333333333e-03;
inline constexpr double kC6 = 1.38888888888888888889e-03;
inline constexpr double kC7 = 1.98412698412698412698e-04;
inline constexpr double kC8 = 2.48015873015873015873e-05;
inline constexpr double kC9 = 2.75573192239858906526e-06;
inline constexpr double kC10 = 2.75573192239858906526e-07;
inline constexpr double kC11 = 2.50521083854417187751e-08;
inline constexpr double kC12 = 2.08767569878680989792e-09;
inline constexpr double kC13 = 1.60590438368216145994e-10;

// 2^e for e in [-1022, 1023], built straight from the exponent field.
inline double two_pow(long long e) {
    return std::bit_cast<double>(static_cast<std::uint64_t>(1023 + e) << 52);
}

inline double exp_core(double x) {
    if (std::isnan(x)) return x;
    if (x >= kOverflowX) return std::numeric_limits<double>::infinity();
    if (x <= kUnderflowX) return 0.0;

    const double k = std::nearbyint(x * kLog2E);
    double r = std::fma(k, -kLn2Hi, x);
    r = std::fma(k, -kLn2Lo, r);

    double p = kC13;
    p = std::fma(p, r, kC12);
    p = std::fma(p, r, kC11);
    p = std::fma(p, r, kC10);
    p = std::fma(p, r, kC9);
    p = std::fma(p, r, kC8);
    p = std::fma(p, r, kC7);
    p = std::fma(p, r, kC6);
    p = std::fma(p, r, kC5);
    p = std::fma(p, r, kC4);
    p = std::fma(p, r, kC3);
    p = std::fma(p, r, kC2);
    p = std::fma(p, r, 1.0);
    p = std::fma(p, r, 1.0);

    // k is integral; halving and flooring are exact, so k1 + k2 == k.
    const double k1 = std::floor(k * 0.5);
    const double k2 = k - k1;
    return (p * two_pow(static_cast<long long>(k1))) * two_pow(static_cast<long long>(k2));
}

// Gated concentration sum over m beacons at a single candidate point.
inline double gated_sum_point(double px, double py, const double* bx, const double* by,
                              const double* tgt, std::size_t m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double dx = px - bx[j];
        const double dy = py - by[j];
        const double d2 = std::fma(dx, dx, dy * dy);
        const double c = exp_core(-d2);
        acc += (c < tgt[j]) ? c : 0.0;
    }
    return acc;
}

inline void raw_point(double x, double y, const double* bx, const double* by,
                      std::size_t m, double* out) {
    for (std::size_t j = 0; j < m; ++j) {
        const double dx = x - bx[j];
        const double dy = y - by[j];
        const double d2 = std::fma(dx, dx, dy * dy);
        out[j] = exp_core(-d2);
    }
}

}  // namespace bna::kernels::detail
