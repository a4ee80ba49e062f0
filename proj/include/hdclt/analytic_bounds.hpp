#pragma once

#include <functional>
#include <vector>

#include "hdclt/scaling_solvers.hpp"
#include "hdclt/tail_distributions.hpp"

namespace hdclt {

enum class BCoeffSource { user, empirical };

struct ZoneBoundProfile {
    TailClass class_id = TailClass::I;
    double zone_edge = 0.0;
    double b_coeff = 0.0;
    BCoeffSource b_source = BCoeffSource::user;
    double tail_bound = 0.0;
    double log_tail_bound = 0.0;  // exact log of tail_bound, kept to avoid underflow
};

// Zone edge and tail-zone bound of the class, with the moderate-zone
// coefficient b_coeff supplied by the caller (user value or MC estimate).
// Epsilon is unused for Class I.
ZoneBoundProfile zone_bound_profile(TailClass class_id, const StandardizedDist& d, double log_n,
                                    double epsilon, double b_coeff,
                                    BCoeffSource source = BCoeffSource::user);

// Envelopes for l(x) = max(F_n(x), Phi(x)) and d(x) = |F_n(x) - Phi(x)|.
struct EnvelopePair {
    double b_coeff = 0.0;
    double zone_edge = 0.0;
    double tail_bound = 0.0;

    // b-dependent form, capped at 1.
    double l_env(double x) const;
    // b-free form, valid once b_coeff is small enough.
    double l_env_simplified(double x) const;
    double d_env(double x) const;
};
EnvelopePair envelopes(const ZoneBoundProfile& profile);

// d = 1 / (1 - phi(1) / (sqrt(5) + 1)), the ratio base of the middle-zone sum.
double partition_ratio_base();

struct PartitionBound {
    double A1 = 0.0, A2 = 0.0, A3 = 0.0, A = 0.0;
};
// A1 = p * tail_bound, A2 = d (log d)^{-1} d^{-1/log d} b,
// A3 = 5 b + p b phi(edge) / edge; p enters only through log_p.
PartitionBound partition_bound(const ZoneBoundProfile& profile, double log_p);

// One-dimensional law of the normalized sum as seen by the rectangle bound:
// cdf(x) = P(S <= x), cdf_left(x) = P(S < x).
struct MarginalLaw {
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;
};

// L1(a) + L2(b) for the rectangle prod_j [a_j, b_j]; entries may be +-inf.
double rectangle_bound(const std::vector<double>& a, const std::vector<double>& b,
                       const MarginalLaw& marginal,
                       const std::function<double(double)>& gauss_cdf = {});

// sqrt(2 log p - log log p); requires log_p > 1.
double zone_ratio_threshold(double log_p);

struct NecessityProbe {
    double x_n = 0.0;
    double log_decay_bound = 0.0;  // log of the bound on P(max_j T_nj <= x_n)
    double log_tail_term = 0.0;    // log of c n P(X > scale * x_n)
    double p_log_phi = 0.0;        // p log Phi(x_n), -1 by construction
};

// x_n with Phi(x_n)^p = e^{-1}, and p log(1 - c n P(X > scale x_n)) with
// scale sqrt(n) (Classes II, III) or B_n (Class IV), c = 1/2 or 1/4.
NecessityProbe necessity_probe(const StandardizedDist& d, double log_n, double log_p,
                               TailClass class_id);

// Solves log Phi(x) = -e^{-log_p}.
double calibrate_max_threshold(double log_p);

// E[X^2; |X| > x] * g(x): tends to 0 when the Class III zone result applies.
double class3_moment_diagnostic(const StandardizedDist& d, double x);

}  // namespace hdclt
