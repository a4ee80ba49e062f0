#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

#include "hdclt/errors.hpp"
#include "hdclt/monte_carlo.hpp"

namespace hdclt {

namespace {

constexpr char kMagic[6] = {'H', 'D', 'C', 'L', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
}

}  // namespace

double EmpiricalCDF::F(double t) const {
    if (reps == 0) throw EstimationError("empirical CDF has no values");
    const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), t);
    return static_cast<double>(it - sorted_values.begin()) / static_cast<double>(reps);
}

double EmpiricalCDF::F_left(double t) const {
    if (reps == 0) throw EstimationError("empirical CDF has no values");
    const auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), t);
    return static_cast<double>(it - sorted_values.begin()) / static_cast<double>(reps);
}

void EmpiricalCDF::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(kMagic, sizeof kMagic);
    put_u64(os, n);
    put_u64(os, reps);
    put_u64(os, seed);
    os.put(static_cast<char>(normalization == Normalization::B_n ? 1 : 0));
    for (double v : sorted_values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64(os, bits);
    }
    if (!os) throw std::runtime_error("write failed for " + path);
}

EmpiricalCDF EmpiricalCDF::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[6];
    is.read(magic, 6);
    if (!is || std::memcmp(magic, kMagic, 6) != 0) throw std::runtime_error(path + ": bad magic");
    EmpiricalCDF f;
    f.n = get_u64(is);
    f.reps = get_u64(is);
    f.seed = get_u64(is);
    const int norm = is.get();
    if (norm != 0 && norm != 1) throw std::runtime_error(path + ": bad normalization byte");
    f.normalization = norm == 1 ? Normalization::B_n : Normalization::sqrt_n;
    f.sorted_values.resize(f.reps);
    for (auto& v : f.sorted_values) {
        const std::uint64_t bits = get_u64(is);
        std::memcpy(&v, &bits, 8);
    }
    if (!is) throw std::runtime_error(path + ": truncated file");
    if (!std::is_sorted(f.sorted_values.begin(), f.sorted_values.end()))
        throw std::runtime_error(path + ": values not sorted");
    return f;
}

}  // namespace hdclt
