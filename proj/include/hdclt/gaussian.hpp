#pragma once

namespace hdclt {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// exp(x^2) * erfc(x), accurate in relative terms for every finite x >= 0.
double erfcx(double x);

double normal_pdf(double t);
double log_normal_pdf(double t);

// Phi(t). Throws DomainError on non-finite t.
double normal_cdf(double t);
// 1 - Phi(t) without cancellation; relative accuracy holds far into the tail.
double normal_sf(double t);
double log_normal_cdf(double t);
double log_normal_sf(double t);

// (1 - Phi(t)) / phi(t), finite for all t (no underflow for large t).
double mills_ratio(double t);

struct MillsEnvelope {
    double lower;  // 2 / (sqrt(t^2 + 4) + t)
    double upper;  // 1 / t
};
MillsEnvelope mills_envelope(double t);

// Inverse of Phi on (0,1), |Phi(t) - u| <= 1e-12.
double normal_quantile(double u);
// t with log(1 - Phi(t)) = log_tail, for log_tail < 0 of any magnitude.
double normal_upper_quantile_log(double log_tail);

// log(-log(1 - exp(l))) for l < 0, i.e. log of -log1p(-q) with q = e^l.
double log_neg_log1m_exp(double l);

}  // namespace hdclt
