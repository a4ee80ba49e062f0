#include "hdclt/scaling_solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hdclt/errors.hpp"
#include "numerics.hpp"

namespace hdclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_log_n(double log_n) {
    if (!(log_n >= std::log(2.0)) || !std::isfinite(log_n))
        throw SpecificationError("scaling solvers need n >= 2");
}

}  // namespace

TailFunction TailFunction::power(double gamma) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw SpecificationError("h(x) = x^gamma needs 0 < gamma < 2");
    return {[gamma](double t) { return std::exp(gamma * t); }, gamma, [gamma](double t) { return gamma * t; }};
}

TailFunction TailFunction::polylog(double gamma) {
    if (!(gamma > 0.0)) throw SpecificationError("h(x) = (log x)^gamma needs gamma > 0");
    return {[gamma](double t) { return t > 0.0 ? std::pow(t, gamma) : 0.0; }, std::nullopt,
            [gamma](double t) { return t > 0.0 ? gamma * std::log(t) : -kInf; }};
}

TailFunction TailFunction::plain(std::function<double(double)> h) {
    return {[h = std::move(h)](double t) { return h(std::exp(t)); }, std::nullopt, {}};
}

TailFunction TailFunction::from_spec(const TailSpec& spec) {
    validate(spec);
    switch (spec.form) {
        case TailForm::gaussian:
        case TailForm::power: return power(spec.gamma);
        case TailForm::polylog: return polylog(spec.gamma);
        default: throw SpecificationError("h is defined for Class I specs only");
    }
}

ScalingSolution solve_lambda_log(const TailFunction& h, double log_n) {
    require_log_n(log_n);
    const double half = 0.5 * log_n;
    // phi(L) = log h(sqrt(n) e^L) - 2L; the root is log Lambda.
    auto phi = [&](double L) {
        if (h.log_at_log) return h.log_at_log(half + L) - 2.0 * L;
        const double v = h.at_log(half + L);
        return (v > 0.0 ? std::log(v) : -kInf) - 2.0 * L;
    };

    std::ostringstream trace;
    double la = std::numeric_limits<double>::quiet_NaN();
    for (double L = -30.0; L <= half + 60.0; L += 0.25) {
        const double v = phi(L);
        if (v > 0.0) {
            la = L;
            break;
        }
        if (std::fmod(L, 8.0) == 0.0) trace << " L=" << L << ":" << v;
    }
    if (std::isnan(la))
        throw SolverError("solve_lambda: h(sqrt(n) Lambda) never exceeds Lambda^2 on the scan;" +
                          trace.str());
    double step = 1.0, lb = la + step;
    while (!(phi(lb) < 0.0)) {
        trace << " L=" << lb << ":" << phi(lb);
        step *= 2.0;
        lb = la + step;
        if (step > 1e6) throw SolverError("solve_lambda: no upper bracket;" + trace.str());
    }
    // The supported h forms cross Lambda^2 exactly once on the bracket.
    int changes = 0;
    double prev = phi(la);
    for (int i = 1; i <= 64; ++i) {
        const double cur = phi(la + (lb - la) * i / 64.0);
        if ((cur < 0.0) != (prev < 0.0)) ++changes;
        prev = cur;
    }
    if (changes != 1)
        throw SolverError("solve_lambda: " + std::to_string(changes) +
                          " sign changes on the bracket [" + std::to_string(la) + ", " +
                          std::to_string(lb) + "] in log Lambda");

    ScalingSolution sol;
    sol.log_n = log_n;
    sol.kind = ScalingKind::Lambda;
    sol.log_value = detail::find_root(phi, la, lb, 52, &sol.iterations);
    sol.value = std::exp(sol.log_value);
    sol.residual = std::fabs(std::expm1(phi(sol.log_value)));
    if (sol.residual > 1e-10)
        throw SolverError("solve_lambda: residual " + std::to_string(sol.residual) + " above 1e-10");
    if (h.power_exponent) {
        const double g = *h.power_exponent;
        const double log_closed = g * log_n / (2.0 * (2.0 - g));
        sol.closed_form = std::exp(log_closed);
        if (std::fabs(std::expm1(sol.log_value - log_closed)) > 1e-10)
            throw SolverError("solve_lambda: root disagrees with closed form n^{g/(2(2-g))}");
    }
    return sol;
}

ScalingSolution solve_lambda(const TailFunction& h, double n) { return solve_lambda_log(h, std::log(n)); }

ScalingSolution solve_bn_log(const StandardizedDist& d, double log_n) {
    require_log_n(log_n);
    auto log_d = [&](double L) { return d.log_truncated_second_moment_at_log(L); };
    // f(L) = 2L - log n - log D(e^L); positive above the largest root.
    auto f = [&](double L) { return 2.0 * L - log_n - log_d(L); };

    ScalingSolution sol;
    sol.log_n = log_n;
    sol.kind = ScalingKind::Bn;

    double L = 0.5 * log_n + 1.0;
    for (double excess = 1.0; !(f(L) > 0.0); excess *= 2.0) {
        if (excess > 1e300) throw SolverError("solve_bn: no starting point above the fixed point");
        L = 0.5 * log_n + excess;
    }
    // Monotone iteration L <- (log n + log D(e^L)) / 2 descends to the largest root.
    for (int it = 0; it < 200; ++it) {
        const double next = 0.5 * (log_n + log_d(L));
        ++sol.iterations;
        if (!(next <= L)) break;
        const bool done = L - next <= 4.0 * kEps * std::fabs(L);
        L = next;
        if (done) break;
    }
    // Bisection/secant polish on a bracket just below the iterate.
    if (f(L) > 0.0) {
        double delta = 1e-12 * std::max(1.0, std::fabs(L));
        double lo = L - delta;
        while (!(f(lo) < 0.0)) {
            delta *= 4.0;
            lo = L - delta;
            if (delta > 1e6 * std::max(1.0, std::fabs(L)))
                throw SolverError("solve_bn: failed to bracket the fixed point below " +
                                  std::to_string(L));
        }
        int extra = 0;
        L = detail::find_root(f, lo, L, 52, &extra);
        sol.iterations += extra;
    }
    sol.log_value = L;
    sol.value = std::exp(L);
    sol.residual = std::fabs(std::expm1(-f(L)));
    // Beyond log n ~ 1e7 the spacing of doubles near log B bounds the attainable residual.
    const double floor = std::max(1e-8, 16.0 * kEps * std::fabs(2.0 * L));
    if (!(sol.residual <= floor))
        throw SolverError("solve_bn: residual " + std::to_string(sol.residual) + " above tolerance");
    return sol;
}

ScalingSolution solve_bn(const StandardizedDist& d, double n) { return solve_bn_log(d, std::log(n)); }

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::T1_suff: return "T1_suff";
        case Theorem::T1_nec: return "T1_nec";
        case Theorem::T2_suff: return "T2_suff";
        case Theorem::T2_nec: return "T2_nec";
        case Theorem::T3_suff: return "T3_suff";
        case Theorem::T3_nec: return "T3_nec";
        case Theorem::T4_suff: return "T4_suff";
        case Theorem::T4_nec: return "T4_nec";
    }
    return "?";
}

Theorem parse_theorem(const std::string& s) {
    for (auto t : {Theorem::T1_suff, Theorem::T1_nec, Theorem::T2_suff, Theorem::T2_nec,
                   Theorem::T3_suff, Theorem::T3_nec, Theorem::T4_suff, Theorem::T4_nec})
        if (s == to_string(t)) return t;
    throw SpecificationError("unknown theorem side '" + s + "'");
}

bool is_sufficiency(Theorem t) {
    return t == Theorem::T1_suff || t == Theorem::T2_suff || t == Theorem::T3_suff ||
           t == Theorem::T4_suff;
}

TailClass theorem_class(Theorem t) {
    switch (t) {
        case Theorem::T1_suff:
        case Theorem::T1_nec: return TailClass::I;
        case Theorem::T2_suff:
        case Theorem::T2_nec: return TailClass::II;
        case Theorem::T3_suff:
        case Theorem::T3_nec: return TailClass::III;
        default: return TailClass::IV;
    }
}

DimensionSchedule schedule_log(Theorem theorem, const StandardizedDist& d, double log_n,
                               double epsilon) {
    const TailSpec& spec = d.spec();
    if (spec.class_id != theorem_class(theorem))
        throw SpecificationError(std::string(to_string(theorem)) + " needs a Class " +
                                 to_string(theorem_class(theorem)) + " spec");
    require_log_n(log_n);
    const bool suff = is_sufficiency(theorem);
    DimensionSchedule s;
    s.theorem = theorem;
    s.epsilon = epsilon;
    auto sqrt_n = [&] {
        ScalingSolution r;
        r.log_n = log_n;
        r.kind = ScalingKind::SqrtN;
        r.log_value = 0.5 * log_n;
        r.value = std::exp(r.log_value);
        return r;
    };
    auto unit_eps = [&] {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw SpecificationError("epsilon must lie in (0,1) for " + std::string(to_string(theorem)));
    };
    switch (theorem_class(theorem)) {
        case TailClass::I: {
            s.scaling = solve_lambda_log(TailFunction::from_spec(spec), log_n);
            const double l2 = s.scaling.value * s.scaling.value;
            s.log_p = suff ? 0.5 * l2 : std::sqrt(2.0) * l2;
            break;
        }
        case TailClass::II: {
            const double base = spec.m / 2.0 - 1.0;
            if (!(epsilon > 0.0) || (suff && !(epsilon < base)))
                throw SpecificationError("epsilon must lie in (0, m/2 - 1) on the sufficiency side and be positive on the necessity side");
            s.scaling = sqrt_n();
            s.log_p = (suff ? base - epsilon : base + epsilon) * log_n;
            break;
        }
        case TailClass::III: {
            unit_eps();
            s.scaling = sqrt_n();
            s.log_p = (suff ? 1.0 - epsilon : 1.0 + epsilon) * g_at_log(spec, 0.5 * log_n);
            break;
        }
        case TailClass::IV: {
            unit_eps();
            s.scaling = solve_bn_log(d, log_n);
            s.log_p = (suff ? 1.0 - epsilon : 1.0 + epsilon) * d.v_at_log(s.scaling.log_value);
            break;
        }
    }
    return s;
}

DimensionSchedule schedule(Theorem theorem, const StandardizedDist& d, double n, double epsilon) {
    return schedule_log(theorem, d, std::log(n), epsilon);
}

}  // namespace hdclt
