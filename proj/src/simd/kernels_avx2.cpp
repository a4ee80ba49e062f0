// Compiled with -mavx2 on x86-64; only reached after a runtime CPU check.
#include <algorithm>

#include "hdclt/rng.hpp"
#include "hdclt/simd_kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace hdclt::kernels {

#if defined(__AVX2__)

// Four replications per register, one per 64-bit lane. Lanes whose uniform
// falls outside the linear body are patched through the scalar tail map, so
// every lane performs exactly the scalar sequence of additions.
void sum_replications_avx2(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                           std::size_t count, std::uint64_t n, double scale, double* out) {
    const __m256d lo = _mm256_set1_pd(map.body_lo);
    const __m256d hi = _mm256_set1_pd(map.body_hi);
    const __m256d slope = _mm256_set1_pd(map.slope);
    const __m256d offset = _mm256_set1_pd(map.offset);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half_ulp = _mm256_set1_pd(0x1p-53);
    const __m256i exponent = _mm256_set1_epi64x(0x3FF0000000000000LL);
    const __m256d vscale = _mm256_set1_pd(scale);

    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        alignas(32) std::uint64_t st[4][4];
        for (int lane = 0; lane < 4; ++lane) {
            const auto g = Xoshiro256Plus::for_stream(seed, first_rep + k + lane);
            for (int w = 0; w < 4; ++w) st[w][lane] = g.s[w];
        }
        __m256i s0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(st[0]));
        __m256i s1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(st[1]));
        __m256i s2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(st[2]));
        __m256i s3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(st[3]));
        __m256d sum = _mm256_setzero_pd();

        for (std::uint64_t i = 0; i < n; ++i) {
            const __m256i res = _mm256_add_epi64(s0, s3);
            const __m256i t = _mm256_slli_epi64(s1, 17);
            s2 = _mm256_xor_si256(s2, s0);
            s3 = _mm256_xor_si256(s3, s1);
            s1 = _mm256_xor_si256(s1, s2);
            s0 = _mm256_xor_si256(s0, s3);
            s2 = _mm256_xor_si256(s2, t);
            s3 = _mm256_or_si256(_mm256_slli_epi64(s3, 45), _mm256_srli_epi64(s3, 19));

            const __m256i bits = _mm256_or_si256(_mm256_srli_epi64(res, 12), exponent);
            const __m256d u = _mm256_add_pd(_mm256_sub_pd(_mm256_castsi256_pd(bits), one), half_ulp);
            __m256d x = _mm256_add_pd(_mm256_mul_pd(u, slope), offset);
            const __m256d in_body =
                _mm256_and_pd(_mm256_cmp_pd(u, lo, _CMP_GE_OQ), _mm256_cmp_pd(u, hi, _CMP_LE_OQ));
            const int mask = _mm256_movemask_pd(in_body);
            if (mask != 0xF) {
                alignas(32) double ub[4], xb[4];
                _mm256_store_pd(ub, u);
                _mm256_store_pd(xb, x);
                for (int lane = 0; lane < 4; ++lane)
                    if (!((mask >> lane) & 1)) xb[lane] = map.tail(map.ctx, ub[lane]);
                x = _mm256_load_pd(xb);
            }
            sum = _mm256_add_pd(sum, x);
        }
        _mm256_storeu_pd(out + k, _mm256_mul_pd(sum, vscale));
    }
    if (k < count)
        sum_replications_scalar(map, seed, first_rep + k, count - k, n, scale, out + k);
}

double max_gap_avx2(const double* lo, const double* hi, const double* ref, const double* w,
                    std::size_t size) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= size; i += 4) {
        const __m256d r = _mm256_loadu_pd(ref + i);
        const __m256d a = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(hi + i), r));
        const __m256d b = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(lo + i), r));
        __m256d g = _mm256_max_pd(a, b);
        if (w) g = _mm256_mul_pd(g, _mm256_loadu_pd(w + i));
        m = _mm256_max_pd(m, g);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    if (i < size) best = std::max(best, max_gap_scalar(lo + i, hi + i, ref + i, w ? w + i : nullptr, size - i));
    return best;
}

#else

void sum_replications_avx2(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                           std::size_t count, std::uint64_t n, double scale, double* out) {
    sum_replications_scalar(map, seed, first_rep, count, n, scale, out);
}

double max_gap_avx2(const double* lo, const double* hi, const double* ref, const double* w,
                    std::size_t size) {
    return max_gap_scalar(lo, hi, ref, w, size);
}

#endif

}  // namespace hdclt::kernels
