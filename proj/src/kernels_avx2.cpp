// AVX2+FMA backend. Compiled with -mavx2 -mfma; only ever called after the
// dispatcher has confirmed CPU support. Each vector lane performs exactly the
// operation sequence of kernels_detail.hpp, so outputs match the scalar
// backend bit for bit (loop tails call the shared scalar core directly).

#if defined(__x86_64__) || defined(__amd64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#include "bna/kernels.hpp"
#include "kernels_detail.hpp"

namespace bna::kernels {

namespace {

using namespace detail;

// 2^e per lane for integral e in [-1022, 1023]: place e+1023 in the low
// mantissa bits via the 2^52 shift trick, then slide it into the exponent.
inline __m256d pow2_lanes(__m256d e) {
    const __m256d offset = _mm256_set1_pd(0x1.0p52 + 1023.0);
    __m256i bits = _mm256_castpd_si256(_mm256_add_pd(e, offset));
    return _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
}

inline __m256d exp4(__m256d x) {
    const __m256d lo = _mm256_set1_pd(kUnderflowX);
    const __m256d hi = _mm256_set1_pd(kOverflowX);

    // Clamp before the core so extreme lanes stay finite; their results are
    // replaced by the blends below. max/min also squeeze NaN lanes onto lo.
    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(kLog2E)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fmadd_pd(k, _mm256_set1_pd(-kLn2Hi), xc);
    r = _mm256_fmadd_pd(k, _mm256_set1_pd(-kLn2Lo), r);

    __m256d p = _mm256_set1_pd(kC13);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC12));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC11));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC10));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC9));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC8));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC7));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC6));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC4));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC3));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kC2));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.5)));
    const __m256d k2 = _mm256_sub_pd(k, k1);
    __m256d res = _mm256_mul_pd(_mm256_mul_pd(p, pow2_lanes(k1)), pow2_lanes(k2));

    // The three conditions are mutually exclusive (ordered compares reject NaN).
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    res = _mm256_blendv_pd(res, inf, _mm256_cmp_pd(x, hi, _CMP_GE_OQ));
    res = _mm256_blendv_pd(res, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LE_OQ));
    res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
    return res;
}

void gated_sums_avx2(const double* px, const double* py, std::size_t n,
                     const double* bx, const double* by, const double* tgt,
                     std::size_t m, double* sums) {
    const __m256d signbit = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d pxv = _mm256_loadu_pd(px + i);
        const __m256d pyv = _mm256_loadu_pd(py + i);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < m; ++j) {
            const __m256d dx = _mm256_sub_pd(pxv, _mm256_set1_pd(bx[j]));
            const __m256d dy = _mm256_sub_pd(pyv, _mm256_set1_pd(by[j]));
            const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
            const __m256d c = exp4(_mm256_xor_pd(d2, signbit));
            const __m256d open = _mm256_cmp_pd(c, _mm256_set1_pd(tgt[j]), _CMP_LT_OQ);
            acc = _mm256_add_pd(acc, _mm256_and_pd(c, open));
        }
        _mm256_storeu_pd(sums + i, acc);
    }
    for (; i < n; ++i) {
        sums[i] = gated_sum_point(px[i], py[i], bx, by, tgt, m);
    }
}

void raw_concentrations_avx2(double x, double y, const double* bx, const double* by,
                             std::size_t m, double* out) {
    if (m <= 4) {
        // One vector, lanes = beacons, spare lanes padded with the origin.
        double bxp[4] = {0, 0, 0, 0};
        double byp[4] = {0, 0, 0, 0};
        for (std::size_t j = 0; j < m; ++j) {
            bxp[j] = bx[j];
            byp[j] = by[j];
        }
        const __m256d dx = _mm256_sub_pd(_mm256_set1_pd(x), _mm256_loadu_pd(bxp));
        const __m256d dy = _mm256_sub_pd(_mm256_set1_pd(y), _mm256_loadu_pd(byp));
        const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        const __m256d c = exp4(_mm256_xor_pd(d2, _mm256_set1_pd(-0.0)));
        double lanes[4];
        _mm256_storeu_pd(lanes, c);
        for (std::size_t j = 0; j < m; ++j) out[j] = lanes[j];
        return;
    }
    raw_point(x, y, bx, by, m, out);
}

}  // namespace

extern const KernelTable avx2_table;
const KernelTable avx2_table = {gated_sums_avx2, raw_concentrations_avx2, "avx2"};

}  // namespace bna::kernels

#endif  // x86-64
