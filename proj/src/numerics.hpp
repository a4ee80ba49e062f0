#pragma once
// Thin wrappers over Boost.Math quadrature and bracketing root finders.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hdclt/errors.hpp"

namespace hdclt::detail {

// Adaptive Gauss-Kronrod (15/31) on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
}

// Integral over [a, inf) of a function decaying at infinity.
template <class F>
double integrate_to_inf(F&& f, double a, double tol = 1e-13) {
    thread_local boost::math::quadrature::exp_sinh<double> rule;  // the (a, b) overload is non-const in 1.74
    return rule.integrate(f, a, std::numeric_limits<double>::infinity(), tol);
}

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign (TOMS 748).
template <class F>
double find_root(F&& f, double lo, double hi, int digits = 52, int* iterations = nullptr) {
    std::uintmax_t max_iter = 300;
    const double flo = f(lo), fhi = f(hi);
    if (iterations) *iterations = 0;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw SolverError("find_root: no sign change on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    boost::math::tools::eps_tolerance<double> tol(digits);
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    if (iterations) *iterations = static_cast<int>(max_iter);
    return 0.5 * (r.first + r.second);
}

}  // namespace hdclt::detail
