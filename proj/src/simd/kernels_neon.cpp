#include <algorithm>

#include "hdclt/rng.hpp"
#include "hdclt/simd_kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace hdclt::kernels {

#if defined(__aarch64__) && defined(__ARM_NEON)

// Two replications per register; same lane-patching scheme as the AVX2 path.
void sum_replications_neon(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                           std::size_t count, std::uint64_t n, double scale, double* out) {
    const float64x2_t lo = vdupq_n_f64(map.body_lo);
    const float64x2_t hi = vdupq_n_f64(map.body_hi);
    const float64x2_t slope = vdupq_n_f64(map.slope);
    const float64x2_t offset = vdupq_n_f64(map.offset);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t half_ulp = vdupq_n_f64(0x1p-53);
    const uint64x2_t exponent = vdupq_n_u64(0x3FF0000000000000ULL);

    std::size_t k = 0;
    for (; k + 2 <= count; k += 2) {
        std::uint64_t st[4][2];
        for (int lane = 0; lane < 2; ++lane) {
            const auto g = Xoshiro256Plus::for_stream(seed, first_rep + k + lane);
            for (int w = 0; w < 4; ++w) st[w][lane] = g.s[w];
        }
        uint64x2_t s0 = vld1q_u64(st[0]), s1 = vld1q_u64(st[1]);
        uint64x2_t s2 = vld1q_u64(st[2]), s3 = vld1q_u64(st[3]);
        float64x2_t sum = vdupq_n_f64(0.0);

        for (std::uint64_t i = 0; i < n; ++i) {
            const uint64x2_t res = vaddq_u64(s0, s3);
            const uint64x2_t t = vshlq_n_u64(s1, 17);
            s2 = veorq_u64(s2, s0);
            s3 = veorq_u64(s3, s1);
            s1 = veorq_u64(s1, s2);
            s0 = veorq_u64(s0, s3);
            s2 = veorq_u64(s2, t);
            s3 = vorrq_u64(vshlq_n_u64(s3, 45), vshrq_n_u64(s3, 19));

            const uint64x2_t bits = vorrq_u64(vshrq_n_u64(res, 12), exponent);
            const float64x2_t u = vaddq_f64(vsubq_f64(vreinterpretq_f64_u64(bits), one), half_ulp);
            float64x2_t x = vaddq_f64(vmulq_f64(u, slope), offset);
            const uint64x2_t in_body = vandq_u64(vcgeq_f64(u, lo), vcleq_f64(u, hi));
            const bool in0 = vgetq_lane_u64(in_body, 0) != 0;
            const bool in1 = vgetq_lane_u64(in_body, 1) != 0;
            if (!(in0 && in1)) {
                double ub[2], xb[2];
                vst1q_f64(ub, u);
                vst1q_f64(xb, x);
                if (!in0) xb[0] = map.tail(map.ctx, ub[0]);
                if (!in1) xb[1] = map.tail(map.ctx, ub[1]);
                x = vld1q_f64(xb);
            }
            sum = vaddq_f64(sum, x);
        }
        vst1q_f64(out + k, vmulq_f64(sum, vdupq_n_f64(scale)));
    }
    if (k < count)
        sum_replications_scalar(map, seed, first_rep + k, count - k, n, scale, out + k);
}

double max_gap_neon(const double* lo, const double* hi, const double* ref, const double* w,
                    std::size_t size) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= size; i += 2) {
        const float64x2_t r = vld1q_f64(ref + i);
        float64x2_t g = vmaxq_f64(vabsq_f64(vsubq_f64(vld1q_f64(hi + i), r)),
                                  vabsq_f64(vsubq_f64(vld1q_f64(lo + i), r)));
        if (w) g = vmulq_f64(g, vld1q_f64(w + i));
        m = vmaxq_f64(m, g);
    }
    double best = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
    if (i < size) best = std::max(best, max_gap_scalar(lo + i, hi + i, ref + i, w ? w + i : nullptr, size - i));
    return best;
}

#else

void sum_replications_neon(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                           std::size_t count, std::uint64_t n, double scale, double* out) {
    sum_replications_scalar(map, seed, first_rep, count, n, scale, out);
}

double max_gap_neon(const double* lo, const double* hi, const double* ref, const double* w,
                    std::size_t size) {
    return max_gap_scalar(lo, hi, ref, w, size);
}

#endif

}  // namespace hdclt::kernels
