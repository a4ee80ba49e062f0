#pragma once
// Exact laws of normalized sums of discrete variables, by enumeration.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

struct Atom {
    double value, prob;
};

// Law of n^{-1/2} (Y_1 + ... + Y_n) for iid Y with finitely many atoms.
// Atoms are keyed by the integer-exact unnormalized sum where possible.
inline std::vector<Atom> sum_law(const std::vector<Atom>& y, int n) {
    std::map<double, double> cur{{0.0, 1.0}};
    for (int i = 0; i < n; ++i) {
        std::map<double, double> next;
        for (const auto& [s, p] : cur)
            for (const Atom& a : y) next[s + a.value] += p * a.prob;
        cur.swap(next);
    }
    std::vector<Atom> out;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (const auto& [s, p] : cur) out.push_back({s * scale, p});
    return out;
}

inline double cdf(const std::vector<Atom>& law, double x) {
    double c = 0.0;
    for (const Atom& a : law)
        if (a.value <= x) c += a.prob;
    return c;
}

inline double cdf_left(const std::vector<Atom>& law, double x) {
    double c = 0.0;
    for (const Atom& a : law)
        if (a.value < x) c += a.prob;
    return c;
}

inline double gauss(double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline const std::vector<Atom> rademacher{{-1.0, 0.5}, {1.0, 0.5}};
inline const std::vector<Atom> three_point_sym{{-std::sqrt(2.0), 0.25}, {0.0, 0.5}, {std::sqrt(2.0), 0.25}};
inline const std::vector<Atom> three_point_skew{{-1.0, 1.0 / 3.0}, {0.0, 0.5}, {2.0, 1.0 / 6.0}};

}  // namespace oracle
