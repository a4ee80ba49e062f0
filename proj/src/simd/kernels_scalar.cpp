#include <algorithm>
#include <cmath>

#include "hdclt/rng.hpp"
#include "hdclt/simd_kernels.hpp"

namespace hdclt::kernels {

void sum_replications_scalar(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                             std::size_t count, std::uint64_t n, double scale, double* out) {
    for (std::size_t k = 0; k < count; ++k) {
        auto g = Xoshiro256Plus::for_stream(seed, first_rep + k);
        double sum = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const double u = g.uniform();
            const double x = (u >= map.body_lo && u <= map.body_hi) ? u * map.slope + map.offset
                                                                    : map.tail(map.ctx, u);
            sum += x;
        }
        out[k] = sum * scale;
    }
}

double max_gap_scalar(const double* lo, const double* hi, const double* ref, const double* w,
                      std::size_t size) {
    double m = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        double g = std::max(std::fabs(hi[i] - ref[i]), std::fabs(lo[i] - ref[i]));
        if (w) g *= w[i];
        m = std::max(m, g);
    }
    return m;
}

}  // namespace hdclt::kernels
