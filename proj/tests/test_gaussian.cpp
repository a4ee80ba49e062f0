#include <doctest.h>

#include <cmath>
#include <vector>

#include "hdclt/errors.hpp"
#include "hdclt/gaussian.hpp"

using namespace hdclt;

namespace {

double phi_ref(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

// Composite Simpson rule, used as an independent oracle.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double cdf_ref(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("normal cdf matches Simpson quadrature of the density") {
    for (double t : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5}) {
        const double oracle = 0.5 + simpson(phi_ref, 0.0, t);
        CHECK(normal_cdf(t) == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
}

TEST_CASE("upper tail keeps relative accuracy deep in the tail") {
    for (double t = -5.0; t <= 26.0; t += 0.37)
        CHECK(normal_sf(t) == doctest::Approx(0.5 * std::erfc(t / std::sqrt(2.0))).epsilon(1e-13));
    // asymptotic series oracle at t = 40, where 1 - Phi underflows nothing but erfc is tiny
    const double t = 40.0, t2 = t * t;
    const double series = -0.5 * t2 - std::log(t) - 0.5 * std::log(2.0 * M_PI) +
                          std::log1p(-1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2) + 105.0 / (t2 * t2 * t2 * t2));
    CHECK(log_normal_sf(t) == doctest::Approx(series).epsilon(1e-14));
    // no underflow where exp would underflow
    CHECK(std::isfinite(log_normal_sf(60.0)));
    CHECK(log_normal_sf(60.0) < -1800.0);
    CHECK(log_normal_cdf(-60.0) == doctest::Approx(log_normal_sf(60.0)).epsilon(1e-15));
}

TEST_CASE("erfcx agrees with exp(x^2) erfc(x)") {
    for (double x = 0.0; x <= 25.0; x += 0.173)
        CHECK(erfcx(x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(2e-14));
    // large-argument asymptote 1/(sqrt(pi) x)
    CHECK(erfcx(1e9) == doctest::Approx(1.0 / (std::sqrt(M_PI) * 1e9)).epsilon(1e-15));
}

TEST_CASE("Mills ratio at t = 1 from quadrature") {
    const double tail = simpson(phi_ref, 1.0, 14.0, 200000);
    CHECK(mills_ratio(1.0) == doctest::Approx(tail / phi_ref(1.0)).epsilon(1e-11));
    CHECK(mills_ratio(1.0) == doctest::Approx(0.6556795424187985).epsilon(1e-13));
}

TEST_CASE("Mills envelope holds strictly on a log grid") {
    for (int i = 0; i < 400; ++i) {
        const double t = std::exp(std::log(1e-3) + (std::log(37.0) - std::log(1e-3)) * (i + 1) / 400.0);
        const MillsEnvelope e = mills_envelope(t);
        const double r = mills_ratio(t);
        CHECK(e.lower < r);
        CHECK(r < e.upper);
    }
    CHECK_THROWS_AS(mills_envelope(0.0), DomainError);
    CHECK_THROWS_AS(mills_envelope(-1.0), DomainError);
}

TEST_CASE("quantile inverts the cdf") {
    // bisection on the erfc-based cdf as oracle
    double lo = -1.0, hi = 0.0;
    const double u = std::exp(-1.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf_ref(mid) < u ? lo : hi) = mid;
    }
    CHECK(normal_quantile(u) == doctest::Approx(lo).epsilon(1e-13));
    for (double p : {1e-300, 1e-20, 1e-5, 0.01, 0.3, 0.5, 0.9, 0.999999})
        CHECK(std::fabs(normal_cdf(normal_quantile(p)) - p) <= 1e-12 * std::max(p, 1e-3));
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("upper quantile from a log tail round-trips at any depth") {
    for (double L : {-1e6, -1e4, -745.0, -700.0, -50.0, -3.0, -1.0, -0.5, -0.01}) {
        const double t = normal_upper_quantile_log(L);
        CHECK(log_normal_sf(t) == doctest::Approx(L).epsilon(1e-12));
    }
}

TEST_CASE("log(-log(1 - e^l))") {
    for (double q : {0.3, 0.9, 1e-5, 1e-200}) {
        const double l = std::log(q);
        CHECK(log_neg_log1m_exp(l) == doctest::Approx(std::log(-std::log1p(-q))).epsilon(1e-14));
    }
}

TEST_CASE("non-finite arguments are domain errors") {
    CHECK_THROWS_AS(normal_cdf(std::nan("")), DomainError);
}
