#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hdclt/simd_kernels.hpp"

namespace hdclt {

enum class TailClass { I, II, III, IV };

// Parametric tail shapes. `gaussian` is the exact standard normal reference
// (treated as Class I for schedules).
enum class TailForm {
    gaussian,
    power,      // Class I: h(x) = x^gamma, tail exp(-rate * h(x))
    polylog,    // Class I: h(x) = (log x)^gamma, tail exp(-rate * h(x))
    pareto,     // Class II: two-sided tail l * x^{-m}
    log_power,  // Class III: g(x) = (log x)^beta, tail ~ x^{-2} e^{-g(x)}
    loglog,     // Class III: g(x) = beta * log log x
    example,    // Class IV: 1 - e^{2e+kappa} x^{-2} e^{-kappa (log log x)^eta}, x >= e^e
};

enum class Centering { symmetrize, mean, median };

struct TailSpec {
    TailClass class_id = TailClass::II;
    TailForm form = TailForm::pareto;
    double gamma = 1.0 / 3.0;
    double rate = 2.0;
    double m = 4.0;
    double l = 1.0;
    double beta = 0.5;
    double eta = 1.0;
    double kappa = 1.0;
    // Tail starts at |x| = cutoff; NaN selects the form's default.
    double cutoff = std::numeric_limits<double>::quiet_NaN();
    // Share of the unit variance carried by the tail (power, polylog, log_power, loglog).
    double tail_share = 0.5;
    bool symmetrize = true;
};

TailClass default_class(TailForm form);
const char* to_string(TailClass c);
const char* to_string(TailForm f);
TailClass parse_tail_class(const std::string& s);
TailForm parse_tail_form(const std::string& s);

// Throws SpecificationError naming the violated constraint.
void validate(const TailSpec& spec);

// Class I exponent function h and Class III exponent function g, evaluated
// at x = e^{log_x} so that arguments far beyond double range are usable.
double h_at_log(const TailSpec& spec, double log_x);
double g_at_log(const TailSpec& spec, double log_x);

// Mean-zero law built from a TailSpec. Classes I-III: uniform body on [-b, b]
// plus the exact parametric tail beyond the cutoff, body width solved so that
// the variance is 1. Class IV: the Example law itself, no body, no scaling.
// Without symmetrization the tail sits on the right and the law is shifted
// by its mean (Classes I-III) or median (Class IV).
class StandardizedDist {
public:
    explicit StandardizedDist(const TailSpec& spec);

    const TailSpec& spec() const { return spec_; }
    Centering centering() const { return centering_; }
    bool is_gaussian() const { return spec_.form == TailForm::gaussian; }
    double cutoff() const { return x0_; }
    double body_half_width() const { return b_; }
    double tail_mass() const { return q_; }
    double shift() const { return shift_; }

    double cdf(double x) const;
    double pdf(double x) const;
    double upper_tail(double x) const;  // P(X > x)
    double tail_bar(double x) const;    // P(|X| > x), x >= 0
    double quantile(double u) const;

    // log P(X > e^{log_x}) and log P(|X| > e^{log_x}); valid for huge log_x.
    double log_upper_tail_at_log(double log_x) const;
    double log_tail_bar_at_log(double log_x) const;

    // D(x) = E[X^2; |X| < x]. For the Example law this uses the closed
    // reduction with a z-integral; elsewhere piecewise exact moments.
    double truncated_second_moment(double x) const;
    // log D(e^{log_x}), usable for huge log_x.
    double log_truncated_second_moment_at_log(double log_x) const;
    // D(x) by adaptive quadrature of y^2 f(y) over |y| < x; independent of
    // the reductions above.
    double truncated_second_moment_quadrature(double x) const;
    // E[X^k 1(a < X < b)] by quadrature of the density (k = 0..3), for checks.
    double moment_quadrature(int k, double a, double b) const;

    double mean() const { return 0.0; }
    double variance() const;  // +inf for infinite-variance Example cases
    // v(x) defined by P(|X| > x) = D(x) x^{-2} e^{-v(x)}.
    double v_at_log(double log_x) const;

    std::vector<double> sample(std::size_t count, std::uint64_t seed) const;
    DrawMap draw_map() const;

private:
    // Raw (unshifted) variable Y; X = Y - shift_.
    double psi(double y) const;   // tail exponent in y = log|Y|; S = exp(-(psi - psi0))
    double dpsi(double y) const;
    double psi_minus_2y(double y) const;
    double psi_inverse(double c) const;
    double tail_inverse(double s) const;  // |Y| with S(|Y|) = s, s in (0,1]
    double raw_cdf(double y) const;
    double raw_pdf(double y) const;
    // E[Y^k; x0 <= Y < e^{ly}] per unit right-tail mass, k = 0, 1, 2.
    double unit_tail_moment(int k, double ly) const;
    // integral over [y0, ly] of exp(k y - (psi(y) - psi0)) dy; ly may be +inf.
    double tail_integral(int k, double ly) const;
    // E[Y^k; a < Y < b] for the raw law, k = 0, 1, 2.
    double raw_partial_moment(int k, double a, double b) const;
    bool second_moment_finite() const;

    TailSpec spec_;
    Centering centering_ = Centering::symmetrize;
    double x0_ = 0.0, y0_ = 0.0, psi0_ = 0.0;
    double q_ = 0.0, q_left_ = 0.0, q_right_ = 0.0;
    double b_ = 0.0;
    double shift_ = 0.0;
    double slope_ = 0.0, offset_ = 0.0;
    double body_lo_ = 1.0, body_hi_ = 0.0;
    double variance_ = 1.0;
};

}  // namespace hdclt
