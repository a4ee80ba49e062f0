#include "hdclt/tail_distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "hdclt/errors.hpp"
#include "hdclt/gaussian.hpp"
#include "hdclt/rng.hpp"
#include "numerics.hpp"

namespace hdclt {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& constraint) {
    if (!ok) throw SpecificationError("TailSpec constraint violated: " + constraint);
}

double quantile_trampoline(const void* ctx, double u) {
    return static_cast<const StandardizedDist*>(ctx)->quantile(u);
}

double gaussian_quantile_trampoline(const void*, double u) { return normal_quantile(u); }

}  // namespace

TailClass default_class(TailForm form) {
    switch (form) {
        case TailForm::gaussian:
        case TailForm::power:
        case TailForm::polylog: return TailClass::I;
        case TailForm::pareto: return TailClass::II;
        case TailForm::log_power:
        case TailForm::loglog: return TailClass::III;
        case TailForm::example: return TailClass::IV;
    }
    return TailClass::I;
}

const char* to_string(TailClass c) {
    switch (c) {
        case TailClass::I: return "I";
        case TailClass::II: return "II";
        case TailClass::III: return "III";
        case TailClass::IV: return "IV";
    }
    return "?";
}

const char* to_string(TailForm f) {
    switch (f) {
        case TailForm::gaussian: return "gaussian";
        case TailForm::power: return "power";
        case TailForm::polylog: return "polylog";
        case TailForm::pareto: return "pareto";
        case TailForm::log_power: return "log_power";
        case TailForm::loglog: return "loglog";
        case TailForm::example: return "example";
    }
    return "?";
}

TailClass parse_tail_class(const std::string& s) {
    if (s == "I") return TailClass::I;
    if (s == "II") return TailClass::II;
    if (s == "III") return TailClass::III;
    if (s == "IV") return TailClass::IV;
    throw SpecificationError("unknown tail class '" + s + "' (expected I, II, III or IV)");
}

TailForm parse_tail_form(const std::string& s) {
    for (auto f : {TailForm::gaussian, TailForm::power, TailForm::polylog, TailForm::pareto,
                   TailForm::log_power, TailForm::loglog, TailForm::example})
        if (s == to_string(f)) return f;
    throw SpecificationError("unknown tail form '" + s + "'");
}

void validate(const TailSpec& s) {
    require(s.class_id == default_class(s.form),
            std::string("form '") + to_string(s.form) + "' belongs to class " +
                to_string(default_class(s.form)) + ", not " + to_string(s.class_id));
    const bool has_cutoff = !std::isnan(s.cutoff);
    switch (s.form) {
        case TailForm::gaussian:
            // h(x) = x^gamma only enters schedules here.
            require(s.gamma > 0.0 && s.gamma < 0.5, "Class I power form needs 0 < gamma < 1/2");
            return;
        case TailForm::power:
            require(s.gamma > 0.0 && s.gamma < 0.5, "Class I power form needs 0 < gamma < 1/2");
            require(s.rate > 1.0, "Class I tail rate must exceed 1 so that E exp(h(|X|)) is finite");
            break;
        case TailForm::polylog:
            require(s.gamma > 1.0, "Class I poly-log form needs gamma > 1");
            require(s.rate > 1.0, "Class I tail rate must exceed 1 so that E exp(h(|X|)) is finite");
            require(!has_cutoff || s.cutoff > 1.0, "poly-log cutoff must exceed 1");
            break;
        case TailForm::pareto:
            require(s.m > 2.0, "Class II needs m > 2");
            require(s.l > 0.0, "Class II slowly varying constant l must be positive");
            break;
        case TailForm::log_power:
            require(s.beta > 0.0 && s.beta < 1.0, "Class III g = (log x)^beta needs 0 < beta < 1");
            require(!has_cutoff || s.cutoff > 1.0, "Class III cutoff must exceed 1");
            break;
        case TailForm::loglog:
            require(s.beta > 1.0, "Class III g = beta log log x needs beta > 1");
            require(!has_cutoff || s.cutoff > kE, "Class III log-log cutoff must exceed e");
            break;
        case TailForm::example:
            require(s.kappa > 0.0, "Example family needs kappa > 0");
            require(s.eta > 0.0, "Example family needs eta > 0");
            require(!has_cutoff, "Example family has a fixed support start e^e; cutoff not allowed");
            return;
    }
    require(!has_cutoff || s.cutoff > 0.0, "cutoff must be positive");
    if (s.form != TailForm::pareto)
        require(s.tail_share > 0.0 && s.tail_share < 1.0, "tail_share must lie in (0,1)");
}

double h_at_log(const TailSpec& s, double log_x) {
    switch (s.form) {
        case TailForm::gaussian:
        case TailForm::power: return std::exp(s.gamma * log_x);
        case TailForm::polylog: return log_x > 0.0 ? std::pow(log_x, s.gamma) : 0.0;
        default: throw SpecificationError("h is defined for Class I specs only");
    }
}

double g_at_log(const TailSpec& s, double log_x) {
    switch (s.form) {
        case TailForm::log_power: return log_x > 0.0 ? std::pow(log_x, s.beta) : 0.0;
        case TailForm::loglog: return log_x > 1.0 ? s.beta * std::log(log_x) : 0.0;
        default: throw SpecificationError("g is defined for Class III specs only");
    }
}

// ---------------------------------------------------------------------------

double StandardizedDist::psi(double y) const {
    const TailSpec& s = spec_;
    switch (s.form) {
        case TailForm::power: return s.rate * std::exp(s.gamma * y);
        case TailForm::polylog: return s.rate * std::pow(y, s.gamma);
        case TailForm::pareto: return s.m * y;
        case TailForm::log_power: return 2.0 * y + std::pow(y, s.beta);
        case TailForm::loglog: return 2.0 * y + s.beta * std::log(y);
        case TailForm::example: return 2.0 * y + s.kappa * std::pow(std::log(y), s.eta);
        case TailForm::gaussian: break;
    }
    return 0.0;
}

double StandardizedDist::psi_minus_2y(double y) const {
    const TailSpec& s = spec_;
    switch (s.form) {
        case TailForm::pareto: return (s.m - 2.0) * y;
        case TailForm::log_power: return std::pow(y, s.beta);
        case TailForm::loglog: return s.beta * std::log(y);
        case TailForm::example: return s.kappa * std::pow(std::log(y), s.eta);
        default: return psi(y) - 2.0 * y;
    }
}

double StandardizedDist::dpsi(double y) const {
    const TailSpec& s = spec_;
    switch (s.form) {
        case TailForm::power: return s.rate * s.gamma * std::exp(s.gamma * y);
        case TailForm::polylog: return s.rate * s.gamma * std::pow(y, s.gamma - 1.0);
        case TailForm::pareto: return s.m;
        case TailForm::log_power: return 2.0 + s.beta * std::pow(y, s.beta - 1.0);
        case TailForm::loglog: return 2.0 + s.beta / y;
        case TailForm::example:
            return 2.0 + s.kappa * s.eta * std::pow(std::log(y), s.eta - 1.0) / y;
        case TailForm::gaussian: break;
    }
    return 0.0;
}

double StandardizedDist::psi_inverse(double c) const {
    const TailSpec& s = spec_;
    switch (s.form) {
        case TailForm::power: return std::log(c / s.rate) / s.gamma;
        case TailForm::polylog: return std::pow(c / s.rate, 1.0 / s.gamma);
        case TailForm::pareto: return c / s.m;
        default: break;
    }
    // psi is increasing on [y0, inf); safeguarded Newton inside a bracket.
    double lo = y0_, hi = std::max(y0_, 0.5 * c);
    while (psi(hi) < c) hi = 2.0 * hi + 1.0;
    double y = hi;
    for (int it = 0; it < 200; ++it) {
        const double f = psi(y) - c;
        if (f == 0.0) return y;
        (f > 0.0 ? hi : lo) = y;
        double next = y - f / dpsi(y);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - y) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(y) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return next;
        y = next;
    }
    return y;
}

double StandardizedDist::tail_inverse(double s) const {
    if (s >= 1.0) return x0_;
    return std::exp(psi_inverse(psi0_ - std::log(s)));
}

bool StandardizedDist::second_moment_finite() const {
    if (spec_.form != TailForm::example) return true;
    return spec_.eta > 1.0 || (spec_.eta == 1.0 && spec_.kappa > 1.0);
}

double StandardizedDist::tail_integral(int k, double ly) const {
    if (!(ly > y0_)) return 0.0;
    const TailSpec& s = spec_;
    const bool to_inf = std::isinf(ly);
    if (s.form == TailForm::pareto) {
        const double head = std::exp(k * y0_);
        const double tail = to_inf ? 0.0 : std::exp((k - s.m) * ly + s.m * y0_);
        return (head - tail) / (s.m - k);
    }
    if (k == 2 && s.form == TailForm::loglog) {
        const double tail = to_inf ? 0.0 : std::pow(ly, 1.0 - s.beta);
        return std::exp(psi0_) * (std::pow(y0_, 1.0 - s.beta) - tail) / (s.beta - 1.0);
    }
    if (k == 2 && s.form == TailForm::log_power) {
        const double a = 1.0 / s.beta;
        const double tail = to_inf ? 0.0 : boost::math::tgamma(a, std::pow(ly, s.beta));
        return std::exp(psi0_) * a * (boost::math::tgamma(a, std::pow(y0_, s.beta)) - tail);
    }
    if (k == 2 && s.form == TailForm::example) {
        // z = kappa (log y)^eta turns the integral into
        // (eta kappa^{1/eta})^{-1} int z^{1/eta-1} exp(-z + (z/kappa)^{1/eta}) dz.
        const double inv_eta = 1.0 / s.eta;
        auto f = [&](double z) {
            return std::exp((inv_eta - 1.0) * std::log(z) - z + std::pow(z / s.kappa, inv_eta));
        };
        const double z_lo = s.kappa * std::pow(std::log(y0_), s.eta);
        const double pre = std::exp(psi0_) / (s.eta * std::pow(s.kappa, inv_eta));
        if (to_inf) {
            if (!second_moment_finite()) return kInf;
            return pre * detail::integrate_to_inf(f, z_lo);
        }
        return pre * detail::integrate(f, z_lo, s.kappa * std::pow(std::log(ly), s.eta));
    }
    auto f = [&](double y) { return std::exp(k * y - (psi(y) - psi0_)); };
    if (to_inf) return detail::integrate_to_inf(f, y0_);
    if (ly - y0_ <= 64.0) return detail::integrate(f, y0_, ly);
    // Remaining forms have integrable tails at this k.
    return detail::integrate_to_inf(f, y0_) - detail::integrate_to_inf(f, ly);
}

double StandardizedDist::unit_tail_moment(int k, double ly) const {
    if (!(ly > y0_)) return 0.0;
    const double head = std::pow(x0_, k);
    double edge = 0.0;
    if (!std::isinf(ly)) edge = std::exp(k * ly - (psi(ly) - psi0_));
    if (k == 0) return head - edge;
    return head - edge + k * tail_integral(k, ly);
}

double StandardizedDist::raw_partial_moment(int k, double a, double b) const {
    if (!(a < b)) return 0.0;
    double total = 0.0;
    auto logp = [](double v) { return v <= 0.0 ? -kInf : std::log(v); };
    if (q_left_ > 0.0 && a < -x0_) {
        // Y = -Z with Z in (max(x0, -b), -a)
        const double z_lo = std::max(x0_, -b), z_hi = -a;
        if (z_lo < z_hi) {
            const double m = unit_tail_moment(k, logp(z_hi)) -
                             (z_lo > x0_ ? unit_tail_moment(k, logp(z_lo)) : 0.0);
            total += (k % 2 ? -1.0 : 1.0) * q_left_ * m;
        }
    }
    if (q_ < 1.0) {
        const double lo = std::max(a, -b_), hi = std::min(b, b_);
        if (lo < hi)
            total += (1.0 - q_) / (2.0 * b_) * (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
    }
    if (q_right_ > 0.0 && b > x0_) {
        const double lo = std::max(a, x0_);
        const double m = unit_tail_moment(k, logp(b)) - (lo > x0_ ? unit_tail_moment(k, logp(lo)) : 0.0);
        total += q_right_ * m;
    }
    return total;
}

StandardizedDist::StandardizedDist(const TailSpec& spec) : spec_(spec) {
    validate(spec_);
    centering_ = spec_.symmetrize ? Centering::symmetrize
                 : spec_.form == TailForm::example ? Centering::median
                                                   : Centering::mean;
    if (is_gaussian()) {
        centering_ = Centering::symmetrize;
        return;
    }
    if (spec_.form == TailForm::example) {
        y0_ = kE;
        x0_ = std::exp(kE);
        psi0_ = psi(y0_);
        q_ = 1.0;
        b_ = 0.0;
        if (spec_.symmetrize) {
            q_left_ = q_right_ = 0.5;
        } else {
            q_right_ = 1.0;
            shift_ = tail_inverse(0.5);
        }
        if (second_moment_finite()) {
            const double m2 = unit_tail_moment(2, kInf);
            const double m1 = spec_.symmetrize ? 0.0 : unit_tail_moment(1, kInf);
            variance_ = m2 - m1 * m1;
        } else {
            variance_ = kInf;
        }
        return;
    }

    double x0 = spec_.cutoff;
    if (std::isnan(x0)) {
        switch (spec_.form) {
            case TailForm::pareto:
                // Puts half of the unit variance into the tail.
                x0 = std::pow(2.0 * spec_.l * spec_.m / (spec_.m - 2.0), 1.0 / (spec_.m - 2.0));
                break;
            case TailForm::loglog: x0 = kE * kE; break;
            case TailForm::power: x0 = 2.0; break;
            default: x0 = kE; break;
        }
    }
    x0_ = x0;
    y0_ = std::log(x0_);
    psi0_ = psi(y0_);

    const double m2_unit = unit_tail_moment(2, kInf);
    const double m1_unit = unit_tail_moment(1, kInf);
    if (spec_.form == TailForm::pareto) {
        q_ = spec_.l * std::pow(x0_, -spec_.m);
        require(q_ < 1.0, "Class II tail mass l * cutoff^-m must be below 1");
    } else {
        q_ = spec_.tail_share / m2_unit;
    }
    const double w = q_ * m2_unit;
    require(w < 1.0, "tail second moment (" + std::to_string(w) +
                         ") must be below the unit variance; raise the cutoff or lower l");
    double mu = 0.0;
    if (spec_.symmetrize) {
        q_left_ = q_right_ = 0.5 * q_;
    } else {
        q_right_ = q_;
        mu = q_ * m1_unit;
    }
    b_ = std::sqrt(3.0 * (1.0 - w + mu * mu) / (1.0 - q_));
    require(b_ < x0_, "body half-width " + std::to_string(b_) + " must stay below the cutoff " +
                          std::to_string(x0_));
    shift_ = mu;
    slope_ = 2.0 * b_ / (1.0 - q_);
    offset_ = -b_ - q_left_ * slope_ - shift_;
    body_lo_ = q_left_;
    body_hi_ = q_left_ + (1.0 - q_);
}

double StandardizedDist::raw_cdf(double y) const {
    if (y <= -x0_) return q_left_ > 0.0 ? q_left_ * std::exp(-(psi(std::log(-y)) - psi0_)) : 0.0;
    if (y < -b_) return q_left_;
    if (y <= b_) return q_ < 1.0 ? q_left_ + (1.0 - q_) * (y + b_) / (2.0 * b_) : q_left_;
    if (y < x0_) return q_left_ + (1.0 - q_);
    return 1.0 - q_right_ * std::exp(-(psi(std::log(y)) - psi0_));
}

double StandardizedDist::raw_pdf(double y) const {
    const double a = std::fabs(y);
    if (a >= x0_) {
        const double mass = y > 0 ? q_right_ : q_left_;
        const double ly = std::log(a);
        return mass * std::exp(-(psi(ly) - psi0_)) * dpsi(ly) / a;
    }
    if (a <= b_ && q_ < 1.0) return (1.0 - q_) / (2.0 * b_);
    return 0.0;
}

double StandardizedDist::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("cdf: NaN argument");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    if (is_gaussian()) return normal_cdf(x);
    return raw_cdf(x + shift_);
}

double StandardizedDist::pdf(double x) const {
    if (is_gaussian()) return normal_pdf(x);
    return raw_pdf(x + shift_);
}

double StandardizedDist::upper_tail(double x) const {
    if (std::isnan(x)) throw DomainError("upper_tail: NaN argument");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    if (is_gaussian()) return normal_sf(x);
    const double y = x + shift_;
    if (y >= x0_) return q_right_ * std::exp(-(psi(std::log(y)) - psi0_));
    if (y >= b_) return q_right_;
    if (y >= -b_ && q_ < 1.0) return q_right_ + (1.0 - q_) * (b_ - y) / (2.0 * b_);
    if (y > -x0_) return q_right_ + (1.0 - q_);
    return 1.0 - raw_cdf(y);
}

double StandardizedDist::tail_bar(double x) const {
    if (!(x >= 0.0)) throw DomainError("tail_bar: requires x >= 0");
    return upper_tail(x) + cdf(-x);
}

double StandardizedDist::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    if (is_gaussian()) return normal_quantile(u);
    if (u >= body_lo_ && u <= body_hi_) return u * slope_ + offset_;
    if (u < body_lo_) return -tail_inverse(u / q_left_) - shift_;
    return tail_inverse((1.0 - u) / q_right_) - shift_;
}

double StandardizedDist::log_upper_tail_at_log(double log_x) const {
    if (is_gaussian()) {
        if (log_x > 350.0) return -kInf;
        return log_normal_sf(std::exp(log_x));
    }
    if (log_x < 30.0) return std::log(upper_tail(std::exp(log_x)));
    // shift_ / x is below e^-30 here; its effect on the tail is negligible.
    return std::log(q_right_) - (psi(log_x) - psi0_);
}

double StandardizedDist::log_tail_bar_at_log(double log_x) const {
    if (is_gaussian()) {
        if (log_x > 350.0) return -kInf;
        return std::log(2.0) + log_normal_sf(std::exp(log_x));
    }
    if (log_x < 30.0) return std::log(tail_bar(std::exp(log_x)));
    return std::log(q_left_ + q_right_) - (psi(log_x) - psi0_);
}

double StandardizedDist::truncated_second_moment(double x) const {
    if (!(x >= 0.0)) throw DomainError("truncated_second_moment: requires x >= 0");
    if (is_gaussian()) {
        if (std::isinf(x)) return 1.0;
        return (1.0 - 2.0 * normal_sf(x)) - 2.0 * x * normal_pdf(x);
    }
    if (spec_.form == TailForm::example && spec_.symmetrize && x <= x0_) return 0.0;
    if (std::isinf(x)) return variance_;
    const double s = shift_;
    const double a = s - x, b = s + x;
    return raw_partial_moment(2, a, b) - 2.0 * s * raw_partial_moment(1, a, b) +
           s * s * raw_partial_moment(0, a, b);
}

double StandardizedDist::log_truncated_second_moment_at_log(double log_x) const {
    if (is_gaussian() || log_x < 30.0) return std::log(truncated_second_moment(std::exp(log_x)));
    // Endpoints shifted by s are indistinguishable from +-x at this scale.
    const double s = shift_;
    double m[3];
    for (int k = 0; k < 3; ++k) {
        double body = 0.0;
        if (q_ < 1.0)
            body = (1.0 - q_) / (2.0 * b_) * (std::pow(b_, k + 1) - std::pow(-b_, k + 1)) / (k + 1);
        const double t = unit_tail_moment(k, log_x);
        m[k] = body + (k % 2 ? -1.0 : 1.0) * q_left_ * t + q_right_ * t;
    }
    return std::log(m[2] - 2.0 * s * m[1] + s * s * m[0]);
}

double StandardizedDist::moment_quadrature(int k, double a, double b) const {
    if (!(a < b)) return 0.0;
    auto piece = [&](double lo, double hi) {
        if (!(lo < hi)) return 0.0;
        auto f = [&](double y) { return std::pow(y, k) * pdf(y); };
        // Tail pieces far from the origin integrate better in log|y|.
        if (lo >= 1.0)
            return detail::integrate(
                [&](double t) { const double y = std::exp(t); return f(y) * y; }, std::log(lo),
                std::log(hi), 1e-12);
        if (hi <= -1.0)
            return detail::integrate(
                [&](double t) { const double y = -std::exp(t); return -f(y) * y; },
                std::log(-hi), std::log(-lo), 1e-12);
        return detail::integrate(f, lo, hi, 1e-12);
    };
    std::vector<double> cuts = {a, b};
    for (double c : {-x0_ - shift_, -b_ - shift_, -1.0, b_ - shift_, x0_ - shift_, 1.0})
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += piece(cuts[i], cuts[i + 1]);
    return total;
}

double StandardizedDist::truncated_second_moment_quadrature(double x) const {
    if (!(x > 0.0)) throw DomainError("truncated_second_moment_quadrature: requires x > 0");
    return moment_quadrature(2, -x, x);
}

double StandardizedDist::variance() const { return variance_; }

double StandardizedDist::v_at_log(double log_x) const {
    if (is_gaussian()) throw SpecificationError("v is not defined for the Gaussian reference");
    const double log_d = log_truncated_second_moment_at_log(log_x);
    if (log_x < 30.0) return log_d - 2.0 * log_x - log_tail_bar_at_log(log_x);
    // log F = log q - psi(y) + psi0; split psi = 2y + rest to avoid cancelling 2y.
    return log_d - std::log(q_left_ + q_right_) + psi_minus_2y(log_x) - psi0_;
}

std::vector<double> StandardizedDist::sample(std::size_t count, std::uint64_t seed) const {
    auto g = Xoshiro256Plus::for_stream(seed, 0);
    std::vector<double> out(count);
    for (auto& x : out) x = quantile(g.uniform());
    return out;
}

DrawMap StandardizedDist::draw_map() const {
    DrawMap m;
    if (is_gaussian()) {
        m.tail = &gaussian_quantile_trampoline;
        return m;
    }
    if (q_ < 1.0) {
        m.body_lo = body_lo_;
        m.body_hi = body_hi_;
        m.slope = slope_;
        m.offset = offset_;
    }
    m.tail = &quantile_trampoline;
    m.ctx = this;
    return m;
}

}  // namespace hdclt
