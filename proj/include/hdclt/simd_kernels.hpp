#pragma once

#include <cstddef>
#include <cstdint>

namespace hdclt {

// Inverse-transform map of a law with a linear body: u in [body_lo, body_hi]
// maps to u*slope + offset, everything else goes through tail(ctx, u).
struct DrawMap {
    double body_lo = 1.0;
    double body_hi = 0.0;
    double slope = 0.0;
    double offset = 0.0;
    double (*tail)(const void* ctx, double u) = nullptr;
    const void* ctx = nullptr;
};

enum class SimdLevel { scalar, avx2, neon };

const char* simd_level_name(SimdLevel level);
// Best level the running CPU supports.
SimdLevel detected_simd_level();
// Level used by the dispatching entry points. Starts at detected_simd_level()
// unless HDCLT_SIMD=scalar is set in the environment.
SimdLevel active_simd_level();
// Throws std::invalid_argument if the CPU cannot run `level`.
void set_simd_level(SimdLevel level);

// out[k] = scale * sum_{i<n} X_i for replication first_rep + k, k < count, where
// the X_i come from the stream Xoshiro256Plus::for_stream(seed, first_rep + k).
// All variants produce bit-identical output.
void sum_replications(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                      std::size_t count, std::uint64_t n, double scale, double* out);

// max_i w_i * max(|hi_i - ref_i|, |lo_i - ref_i|); w may be null (all ones).
double max_gap(const double* lo, const double* hi, const double* ref, const double* w,
               std::size_t size);

namespace kernels {
void sum_replications_scalar(const DrawMap&, std::uint64_t, std::uint64_t, std::size_t,
                             std::uint64_t, double, double*);
void sum_replications_avx2(const DrawMap&, std::uint64_t, std::uint64_t, std::size_t,
                           std::uint64_t, double, double*);
void sum_replications_neon(const DrawMap&, std::uint64_t, std::uint64_t, std::size_t,
                           std::uint64_t, double, double*);
double max_gap_scalar(const double*, const double*, const double*, const double*, std::size_t);
double max_gap_avx2(const double*, const double*, const double*, const double*, std::size_t);
double max_gap_neon(const double*, const double*, const double*, const double*, std::size_t);
}  // namespace kernels

}  // namespace hdclt
