#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hdclt/tail_distributions.hpp"

namespace hdclt {

enum class ScalingKind { Lambda, Bn, SqrtN };

// n is carried as log n: schedules for Classes III and IV need n far beyond
// any integer type. `value` may overflow to +inf; log_value never does.
struct ScalingSolution {
    double log_n = 0.0;
    ScalingKind kind = ScalingKind::Lambda;
    double value = 0.0;
    double log_value = 0.0;
    double residual = 0.0;  // relative residual of the defining equation
    int iterations = 0;
    std::optional<double> closed_form;
};

// Tail exponent function h, evaluated as h(e^t) so that arguments like
// sqrt(n) * Lambda never need to be formed.
struct TailFunction {
    std::function<double(double)> at_log;
    std::optional<double> power_exponent;  // set when h(x) = x^gamma
    // log h(e^t) when known in closed form; keeps the root search finite for huge n.
    std::function<double(double)> log_at_log;

    static TailFunction power(double gamma);
    static TailFunction polylog(double gamma);
    // Wraps a plain h(x); only usable while sqrt(n) Lambda fits in a double.
    static TailFunction plain(std::function<double(double)> h);
    static TailFunction from_spec(const TailSpec& spec);
};

// Lambda with h(sqrt(n) Lambda) = Lambda^2.
ScalingSolution solve_lambda_log(const TailFunction& h, double log_n);
ScalingSolution solve_lambda(const TailFunction& h, double n);

// B with B^2 = n D(B), the largest fixed point of B = sqrt(n D(B)).
ScalingSolution solve_bn_log(const StandardizedDist& d, double log_n);
ScalingSolution solve_bn(const StandardizedDist& d, double n);

enum class Theorem { T1_suff, T1_nec, T2_suff, T2_nec, T3_suff, T3_nec, T4_suff, T4_nec };

const char* to_string(Theorem t);
Theorem parse_theorem(const std::string& s);
bool is_sufficiency(Theorem t);
TailClass theorem_class(Theorem t);

struct DimensionSchedule {
    Theorem theorem = Theorem::T1_suff;
    double epsilon = 0.0;
    double log_p = 0.0;
    ScalingSolution scaling;  // Lambda (T1), Bn (T4), sqrt(n) otherwise
};

// log p on the chosen side of the theorem. Epsilon is unused by T1.
DimensionSchedule schedule_log(Theorem theorem, const StandardizedDist& d, double log_n,
                               double epsilon);
DimensionSchedule schedule(Theorem theorem, const StandardizedDist& d, double n, double epsilon);

}  // namespace hdclt
