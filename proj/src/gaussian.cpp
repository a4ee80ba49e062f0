#include "hdclt/gaussian.hpp"

#include <cmath>
#include <limits>

#include "hdclt/errors.hpp"

namespace hdclt {

namespace {

void require_finite(double t, const char* who) {
    if (!std::isfinite(t)) throw DomainError(std::string(who) + ": non-finite argument");
}

// Rational Chebyshev approximations of W. J. Cody (Math. Comp. 1969) for
// erf on |x| <= 0.46875, and exp(x^2) erfc(x) on (0.46875, 4] and (4, inf).
constexpr double kA[5] = {3.1611237438705656, 113.864154151050156, 377.485237685302021,
                          3209.37758913846947, 0.185777706184603153};
constexpr double kB[4] = {23.6012909523441209, 244.024637934444173, 1282.61652607737228,
                          2844.23683343917062};
constexpr double kC[9] = {0.564188496988670089, 8.88314979438837594, 66.1191906371416295,
                          298.635138197400131,  881.95222124176909,  1712.04761263407058,
                          2051.07837782607147,  1230.33935479799725, 2.15311535474403846e-8};
constexpr double kD[8] = {15.7449261107098347, 117.693950891312499, 537.181101862009858,
                          1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
                          3439.36767414372164, 1230.33935480374942};
constexpr double kP[6] = {0.305326634961232344, 0.360344899949804439, 0.125781726111229246,
                          0.0160837851487422766, 6.58749161529837803e-4, 0.0163153871373020978};
constexpr double kQ[5] = {2.56852019228982242, 1.87295284992346047, 0.527905102951428412,
                          0.0605183413124413191, 0.00233520497626869185};
constexpr double kInvSqrtPi = 0.56418958354775628695;

double erfcx_nonneg(double y) {
    if (y <= 0.46875) {
        const double ysq = y * y;
        double num = kA[4] * ysq, den = ysq;
        for (int i = 0; i < 3; ++i) {
            num = (num + kA[i]) * ysq;
            den = (den + kB[i]) * ysq;
        }
        return std::exp(ysq) * (1.0 - y * (num + kA[3]) / (den + kB[3]));
    }
    if (y <= 4.0) {
        double num = kC[8] * y, den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kC[i]) * y;
            den = (den + kD[i]) * y;
        }
        return (num + kC[7]) / (den + kD[7]);
    }
    if (y >= 6.71e7) return kInvSqrtPi / y;
    const double ysq = 1.0 / (y * y);
    double num = kP[5] * ysq, den = ysq;
    for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * ysq;
        den = (den + kQ[i]) * ysq;
    }
    return (kInvSqrtPi - ysq * (num + kP[4]) / (den + kQ[4])) / y;
}

// exp(-t^2/2) with t^2 split so that the leading square is exact.
double half_gauss_exp(double t) {
    t = std::fabs(t);
    if (t > 40.0) return std::exp(-0.5 * t * t);
    const double head = std::trunc(t * 16.0) / 16.0;
    const double del = (t - head) * (t + head);
    return std::exp(-0.5 * head * head) * std::exp(-0.5 * del);
}

// Upper tail for t >= 0.
double sf_nonneg(double t) { return 0.5 * erfcx_nonneg(t * M_SQRT1_2) * half_gauss_exp(t); }

double log_sf_nonneg(double t) { return std::log(0.5 * erfcx_nonneg(t * M_SQRT1_2)) - 0.5 * t * t; }

// Acklam's rational initial guess for the lower half, refined by Halley steps.
double quantile_lower(double s) {
    constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
    double t;
    if (s < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(s));
        t = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = s - 0.5, r = q * q;
        t = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int it = 0; it < 3; ++it) {
        const double cdf = t <= 0.0 ? sf_nonneg(-t) : 1.0 - sf_nonneg(t);
        const double pdf = kInvSqrt2Pi * half_gauss_exp(t);
        if (pdf == 0.0) break;
        const double e = (cdf - s) / pdf;
        t -= e / (1.0 + 0.5 * t * e);
    }
    return t;
}

}  // namespace

double erfcx(double x) {
    require_finite(x, "erfcx");
    if (x >= 0.0) return erfcx_nonneg(x);
    // exp(x^2) erfc(x) = 2 exp(x^2) - erfcx(-x)
    return 2.0 * std::exp(x * x) - erfcx_nonneg(-x);
}

double normal_pdf(double t) {
    require_finite(t, "normal_pdf");
    return kInvSqrt2Pi * half_gauss_exp(t);
}

double log_normal_pdf(double t) {
    require_finite(t, "log_normal_pdf");
    return -0.5 * t * t - kLogSqrt2Pi;
}

double normal_sf(double t) {
    require_finite(t, "normal_sf");
    return t >= 0.0 ? sf_nonneg(t) : 1.0 - sf_nonneg(-t);
}

double normal_cdf(double t) {
    require_finite(t, "normal_cdf");
    return t <= 0.0 ? sf_nonneg(-t) : 1.0 - sf_nonneg(t);
}

double log_normal_sf(double t) {
    require_finite(t, "log_normal_sf");
    return t >= 0.0 ? log_sf_nonneg(t) : std::log1p(-sf_nonneg(-t));
}

double log_normal_cdf(double t) {
    require_finite(t, "log_normal_cdf");
    return t <= 0.0 ? log_sf_nonneg(-t) : std::log1p(-sf_nonneg(t));
}

double mills_ratio(double t) {
    require_finite(t, "mills_ratio");
    if (t >= 0.0) return std::sqrt(M_PI / 2.0) * erfcx_nonneg(t * M_SQRT1_2);
    return normal_sf(t) / normal_pdf(t);
}

MillsEnvelope mills_envelope(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("mills_envelope: requires finite t > 0");
    return {2.0 / (std::hypot(t, 2.0) + t), 1.0 / t};
}

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile: u must lie in (0,1)");
    if (u == 0.5) return 0.0;
    return u < 0.5 ? quantile_lower(u) : -quantile_lower(1.0 - u);
}

double normal_upper_quantile_log(double log_tail) {
    if (!(log_tail < 0.0) || std::isnan(log_tail))
        throw DomainError("normal_upper_quantile_log: log tail must be negative");
    if (log_tail > -1.0) return -normal_quantile(std::exp(log_tail));
    double t = log_tail > -700.0 ? -quantile_lower(std::exp(log_tail)) : std::sqrt(-2.0 * log_tail);
    // Newton on log(1 - Phi(t)); its derivative is -1 / mills_ratio(t).
    for (int it = 0; it < 100; ++it) {
        const double step = (log_sf_nonneg(t) - log_tail) * std::sqrt(M_PI / 2.0) *
                            erfcx_nonneg(t * M_SQRT1_2);
        t += step;
        if (std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * t) break;
    }
    return t;
}

double log_neg_log1m_exp(double l) {
    if (!(l < 0.0)) throw DomainError("log_neg_log1m_exp: requires l < 0");
    if (l < -30.0) {
        const double q = std::exp(l);
        return l + std::log1p(q * (0.5 + q / 3.0));
    }
    return std::log(-std::log1p(-std::exp(l)));
}

}  // namespace hdclt
