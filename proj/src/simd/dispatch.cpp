#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "hdclt/simd_kernels.hpp"

namespace hdclt {

namespace {

bool cpu_supports(SimdLevel level) {
    switch (level) {
        case SimdLevel::scalar:
            return true;
        case SimdLevel::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case SimdLevel::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

SimdLevel initial_level() {
    const char* env = std::getenv("HDCLT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return SimdLevel::scalar;
    return detected_simd_level();
}

std::atomic<SimdLevel>& current() {
    static std::atomic<SimdLevel> level{initial_level()};
    return level;
}

}  // namespace

const char* simd_level_name(SimdLevel level) {
    switch (level) {
        case SimdLevel::scalar: return "scalar";
        case SimdLevel::avx2: return "avx2";
        case SimdLevel::neon: return "neon";
    }
    return "unknown";
}

SimdLevel detected_simd_level() {
    if (cpu_supports(SimdLevel::avx2)) return SimdLevel::avx2;
    if (cpu_supports(SimdLevel::neon)) return SimdLevel::neon;
    return SimdLevel::scalar;
}

SimdLevel active_simd_level() { return current().load(std::memory_order_relaxed); }

void set_simd_level(SimdLevel level) {
    if (!cpu_supports(level))
        throw std::invalid_argument(std::string("SIMD level not supported on this CPU: ") +
                                    simd_level_name(level));
    current().store(level, std::memory_order_relaxed);
}

void sum_replications(const DrawMap& map, std::uint64_t seed, std::uint64_t first_rep,
                      std::size_t count, std::uint64_t n, double scale, double* out) {
    switch (active_simd_level()) {
        case SimdLevel::avx2:
            return kernels::sum_replications_avx2(map, seed, first_rep, count, n, scale, out);
        case SimdLevel::neon:
            return kernels::sum_replications_neon(map, seed, first_rep, count, n, scale, out);
        case SimdLevel::scalar:
            break;
    }
    kernels::sum_replications_scalar(map, seed, first_rep, count, n, scale, out);
}

double max_gap(const double* lo, const double* hi, const double* ref, const double* w,
               std::size_t size) {
    switch (active_simd_level()) {
        case SimdLevel::avx2: return kernels::max_gap_avx2(lo, hi, ref, w, size);
        case SimdLevel::neon: return kernels::max_gap_neon(lo, hi, ref, w, size);
        case SimdLevel::scalar: break;
    }
    return kernels::max_gap_scalar(lo, hi, ref, w, size);
}

}  // namespace hdclt
