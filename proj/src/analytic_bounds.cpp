#include "hdclt/analytic_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdclt/errors.hpp"
#include "hdclt/gaussian.hpp"

namespace hdclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double class_log_scale(const StandardizedDist& d, double log_n, TailClass c) {
    if (c == TailClass::IV) return solve_bn_log(d, log_n).log_value;
    return 0.5 * log_n;
}

}  // namespace

ZoneBoundProfile zone_bound_profile(TailClass class_id, const StandardizedDist& d, double log_n,
                                    double epsilon, double b_coeff, BCoeffSource source) {
    if (d.spec().class_id != class_id)
        throw SpecificationError(std::string("zone profile for Class ") + to_string(class_id) +
                                 " requested with a Class " + to_string(d.spec().class_id) + " spec");
    if (!(b_coeff >= 0.0)) throw SpecificationError("b_coeff must be nonnegative");
    ZoneBoundProfile p;
    p.class_id = class_id;
    p.b_coeff = b_coeff;
    p.b_source = source;
    switch (class_id) {
        case TailClass::I: {
            const double lambda = solve_lambda_log(TailFunction::from_spec(d.spec()), log_n).value;
            p.zone_edge = lambda;
            p.log_tail_bound = -std::log(lambda) - 0.5 * lambda * lambda;
            break;
        }
        case TailClass::II: {
            const double m = d.spec().m;
            if (!(epsilon > 0.0 && epsilon < m / 2.0 - 1.0))
                throw SpecificationError("Class II zone needs 0 < epsilon < m/2 - 1");
            const double r = (m - 2.0 - 2.0 * epsilon) * log_n;
            p.zone_edge = std::sqrt(r);
            p.log_tail_bound = -(m / 2.0 - 1.0 - epsilon) * log_n - 0.5 * std::log(r);
            break;
        }
        case TailClass::III:
        case TailClass::IV: {
            if (!(epsilon > 0.0 && epsilon < 1.0))
                throw SpecificationError("Class III/IV zone needs 0 < epsilon < 1");
            const double g = class_id == TailClass::III
                                 ? g_at_log(d.spec(), 0.5 * log_n)
                                 : d.v_at_log(solve_bn_log(d, log_n).log_value);
            if (!(g > 0.0)) throw SpecificationError("zone exponent g or v must be positive at this n");
            p.zone_edge = std::sqrt(2.0 * (1.0 - epsilon) * g);
            p.log_tail_bound = -0.5 * std::log(2.0 * g) - (1.0 - epsilon) * g;
            break;
        }
    }
    p.tail_bound = std::exp(p.log_tail_bound);
    return p;
}

double EnvelopePair::l_env(double x) const {
    if (x > zone_edge) return 1.0;
    double v;
    if (x < 1.0) {
        const double phi1 = normal_pdf(1.0);
        v = 1.0 - 2.0 * phi1 / (std::sqrt(5.0) + 1.0) + b_coeff / 2.0;
    } else {
        const double phi = normal_pdf(x);
        v = 1.0 - 2.0 * phi / (std::hypot(x, 2.0) + x) + b_coeff * phi / x;
    }
    return std::min(v, 1.0);
}

double EnvelopePair::l_env_simplified(double x) const {
    if (x > zone_edge) return 1.0;
    if (x < 1.0) return 1.0 - normal_pdf(1.0) / (std::sqrt(5.0) + 1.0);
    return 1.0 - normal_pdf(x) / (5.0 * x);
}

double EnvelopePair::d_env(double x) const {
    const double a = std::fabs(x);
    if (a > zone_edge) return tail_bound;
    if (a == 0.0) return b_coeff / 2.0;
    return b_coeff * std::min(0.5, normal_pdf(a) / a);
}

EnvelopePair envelopes(const ZoneBoundProfile& profile) {
    return {profile.b_coeff, profile.zone_edge, profile.tail_bound};
}

double partition_ratio_base() { return 1.0 / (1.0 - normal_pdf(1.0) / (std::sqrt(5.0) + 1.0)); }

PartitionBound partition_bound(const ZoneBoundProfile& profile, double log_p) {
    if (std::isnan(log_p)) throw DomainError("partition_bound: log_p is NaN");
    PartitionBound r;
    const double b = profile.b_coeff;
    const double d = partition_ratio_base();
    const double log_d = std::log(d);
    r.A1 = std::exp(log_p + profile.log_tail_bound);
    r.A2 = d / log_d * std::exp(-1.0) * b;  // d^{-1/log d} = e^{-1}
    const double edge = profile.zone_edge;
    const double log_a3 = log_p + log_normal_pdf(edge) - std::log(edge);
    r.A3 = 5.0 * b + (b > 0.0 ? b * std::exp(log_a3) : 0.0);
    r.A = r.A1 + r.A2 + r.A3;
    if (std::isnan(r.A)) r.A = kInf;
    return r;
}

namespace {

// sum_k prod_{j != k} l_j * d_k in log space, with exact handling of zero l_j.
double leave_one_out_sum(const std::vector<double>& l, const std::vector<double>& d) {
    double log_sum = 0.0;
    int zeros = 0;
    std::size_t zero_at = 0;
    for (std::size_t j = 0; j < l.size(); ++j) {
        if (l[j] == 0.0) {
            ++zeros;
            zero_at = j;
        } else {
            log_sum += std::log(l[j]);
        }
    }
    if (zeros >= 2) return 0.0;
    if (zeros == 1) return d[zero_at] == 0.0 ? 0.0 : std::exp(log_sum + std::log(d[zero_at]));
    double total = 0.0;
    for (std::size_t k = 0; k < l.size(); ++k)
        if (d[k] > 0.0) total += std::exp(log_sum - std::log(l[k]) + std::log(d[k]));
    return total;
}

}  // namespace

double rectangle_bound(const std::vector<double>& a, const std::vector<double>& b,
                       const MarginalLaw& marginal, const std::function<double(double)>& gauss_cdf) {
    if (a.size() != b.size()) throw DomainError("rectangle_bound: a and b differ in length");
    for (std::size_t j = 0; j < a.size(); ++j)
        if (!(a[j] <= b[j])) throw DomainError("rectangle_bound: a_j > b_j at j = " + std::to_string(j));
    auto gauss = [&](double x) {
        if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
        return gauss_cdf ? gauss_cdf(x) : normal_cdf(x);
    };
    auto F = [&](double x) { return std::isinf(x) ? (x > 0 ? 1.0 : 0.0) : marginal.cdf(x); };
    auto F_left = [&](double x) { return std::isinf(x) ? (x > 0 ? 1.0 : 0.0) : marginal.cdf_left(x); };

    std::vector<double> as = a, bs = b;
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    const std::size_t p = a.size();
    std::vector<double> l1(p), d1(p), l2(p), d2(p);
    for (std::size_t j = 0; j < p; ++j) {
        // P(-S <= -a) = P(S >= a) = 1 - F(a-); Phi(-a) = 1 - Phi(a).
        const double fs = 1.0 - F_left(as[j]), gs = 1.0 - gauss(as[j]);
        l1[j] = std::max(fs, gs);
        d1[j] = std::fabs(F_left(as[j]) - gauss(as[j]));
        const double fb = F(bs[j]), gb = gauss(bs[j]);
        l2[j] = std::max(fb, gb);
        d2[j] = std::fabs(fb - gb);
    }
    return leave_one_out_sum(l1, d1) + leave_one_out_sum(l2, d2);
}

double zone_ratio_threshold(double log_p) {
    if (!(log_p > 1.0)) throw DomainError("zone_ratio_threshold: requires log p > 1");
    return std::sqrt(2.0 * log_p - std::log(log_p));
}

double calibrate_max_threshold(double log_p) {
    if (!std::isfinite(log_p)) throw DomainError("calibrate_max_threshold: log_p must be finite");
    // 1 - Phi(x) = 1 - exp(-delta), delta = e^{-log_p}
    const double delta = std::exp(-log_p);
    double log_tail;
    if (delta < 1e-8)
        log_tail = -log_p + std::log1p(delta * (-0.5 + delta / 6.0));
    else
        log_tail = std::log(-std::expm1(-delta));
    return normal_upper_quantile_log(log_tail);
}

NecessityProbe necessity_probe(const StandardizedDist& d, double log_n, double log_p,
                               TailClass class_id) {
    const TailSpec& spec = d.spec();
    if (spec.class_id != class_id || class_id == TailClass::I)
        throw SpecificationError("necessity probe covers Classes II-IV with a matching spec");
    if (!(log_n >= std::log(2.0))) throw SpecificationError("necessity probe needs n >= 2");

    double boundary = 0.0, log_scale = 0.5 * log_n, c = 0.25;
    ScalingSolution bn;
    switch (class_id) {
        case TailClass::II:
            boundary = (spec.m / 2.0 - 1.0) * log_n;
            c = 0.5;
            break;
        case TailClass::III: boundary = g_at_log(spec, 0.5 * log_n); break;
        default:
            bn = solve_bn_log(d, log_n);
            log_scale = bn.log_value;
            boundary = d.v_at_log(log_scale);
            break;
    }
    if (!(log_p > boundary))
        throw SpecificationError("necessity probe: log p = " + std::to_string(log_p) +
                                 " is on the sufficiency side (boundary " + std::to_string(boundary) + ")");

    NecessityProbe r;
    r.x_n = calibrate_max_threshold(log_p);
    r.p_log_phi = -std::exp(log_p + log_neg_log1m_exp(log_normal_sf(r.x_n)));
    if (!(r.x_n > 0.0)) throw SpecificationError("necessity probe needs p large enough that x_n > 0");
    const double log_x = std::log(r.x_n);
    if (class_id == TailClass::IV) {
        // n P(|X| > B x) = [D(Bx) / D(B)] x^{-2} e^{-v(Bx)} because n D(B) = B^2;
        // this avoids forming log n - 2 log B when both are huge.
        const double ly = log_scale + log_x;
        const double one_sided = d.log_upper_tail_at_log(ly) - d.log_tail_bar_at_log(ly);
        r.log_tail_term = std::log(c) + d.log_truncated_second_moment_at_log(ly) -
                          d.log_truncated_second_moment_at_log(log_scale) - 2.0 * log_x -
                          d.v_at_log(ly) + one_sided;
    } else {
        r.log_tail_term = std::log(c) + log_n + d.log_upper_tail_at_log(log_scale + log_x);
    }
    if (r.log_tail_term >= 0.0)
        r.log_decay_bound = -kInf;
    else
        r.log_decay_bound = -std::exp(log_p + log_neg_log1m_exp(r.log_tail_term));
    return r;
}

double class3_moment_diagnostic(const StandardizedDist& d, double x) {
    if (d.spec().class_id != TailClass::III)
        throw SpecificationError("class3_moment_diagnostic needs a Class III spec");
    return (d.variance() - d.truncated_second_moment(x)) * g_at_log(d.spec(), std::log(x));
}

}  // namespace hdclt
