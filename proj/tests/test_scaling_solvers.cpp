#include <doctest.h>

#include <cmath>

#include "hdclt/errors.hpp"
#include "hdclt/scaling_solvers.hpp"

using namespace hdclt;

namespace {

TailSpec example(double eta, double kappa) {
    TailSpec s;
    s.class_id = TailClass::IV;
    s.form = TailForm::example;
    s.eta = eta;
    s.kappa = kappa;
    return s;
}

}  // namespace

TEST_CASE("Lambda for h(x) = x^gamma matches n^{gamma / (2 (2 - gamma))}") {
    for (double gamma : {0.1, 0.25, 0.4, 0.499})
        for (int k = 2; k <= 8; ++k) {
            const double n = std::pow(10.0, k);
            const double closed = std::pow(n, gamma / (2.0 * (2.0 - gamma)));
            const ScalingSolution s = solve_lambda(TailFunction::power(gamma), n);
            CHECK(s.kind == ScalingKind::Lambda);
            CHECK(std::fabs(s.value / closed - 1.0) <= 1e-10);
            CHECK(s.residual <= 1e-10);
        }
}

TEST_CASE("Lambda solves h(sqrt(n) Lambda) = Lambda^2 for poly-log h") {
    for (double gamma : {1.5, 2.0, 3.0})
        for (double log_n : {5.0, 20.0, 300.0}) {
            const ScalingSolution s = solve_lambda_log(TailFunction::polylog(gamma), log_n);
            const double lhs = std::pow(0.5 * log_n + s.log_value, gamma);
            CHECK(lhs == doctest::Approx(s.value * s.value).epsilon(1e-10));
            CHECK(!s.closed_form);
        }
    // a plain h gives the same root as the log-space form
    const auto h = TailFunction::plain([](double x) { return std::cbrt(x); });
    CHECK(solve_lambda_log(h, 20.0).value ==
          doctest::Approx(solve_lambda_log(TailFunction::power(1.0 / 3.0), 20.0).value).epsilon(1e-10));
}

TEST_CASE("Lambda in log space for n far beyond double range") {
    const double gamma = 1.0 / 3.0, log_n = 1e5;
    const ScalingSolution s = solve_lambda_log(TailFunction::power(gamma), log_n);
    CHECK(s.log_value == doctest::Approx(gamma / (2.0 * (2.0 - gamma)) * log_n).epsilon(1e-12));
}

TEST_CASE("the gamma = 1/2 boundary is rejected") {
    TailSpec s;
    s.class_id = TailClass::I;
    s.form = TailForm::power;
    s.gamma = 0.5;
    CHECK_THROWS_AS(validate(s), SpecificationError);
    CHECK_THROWS_AS(StandardizedDist{s}, SpecificationError);
}

TEST_CASE("B_n is the largest root of B^2 = n D(B)") {
    for (auto [eta, kappa] : {std::pair{1.0, 1.0}, {1.0, 0.5}, {0.5, 1.0}, {2.0, 4.0}}) {
        const StandardizedDist d(example(eta, kappa));
        for (double log_n : {std::log(1e4), std::log(1e6), 50.0, 400.0}) {
            CAPTURE(eta);
            CAPTURE(kappa);
            CAPTURE(log_n);
            const ScalingSolution s = solve_bn_log(d, log_n);
            CHECK(s.kind == ScalingKind::Bn);
            const double eq = 2.0 * s.log_value - log_n - d.log_truncated_second_moment_at_log(s.log_value);
            CHECK(std::fabs(eq) <= 1e-8 * std::max(1.0, log_n));
            // above B the left side dominates: no larger root
            for (double f : {1.01, 2.0, 1e3}) {
                const double lb = s.log_value + std::log(f);
                CHECK(2.0 * lb > log_n + d.log_truncated_second_moment_at_log(lb));
            }
        }
    }
}

TEST_CASE("finite variance: B_n / sqrt(n) tends to the standard deviation") {
    const StandardizedDist d(example(2.0, 1.0));
    const ScalingSolution s = solve_bn_log(d, 230.0);
    CHECK(std::exp(2.0 * s.log_value - 230.0) == doctest::Approx(d.variance()).epsilon(1e-8));
    TailSpec par;
    const StandardizedDist unit(par);
    CHECK(solve_bn(unit, 1e8).value == doctest::Approx(1e4).epsilon(1e-6));
}

TEST_CASE("dimension schedules by theorem side") {
    TailSpec c1;
    c1.class_id = TailClass::I;
    c1.form = TailForm::power;
    c1.gamma = 1.0 / 3.0;
    c1.rate = 4.0;
    c1.cutoff = 3.0;
    c1.tail_share = 0.9;
    const StandardizedDist d1(c1);
    const double n = 1e3;
    const double lambda = std::pow(n, (1.0 / 3.0) / (2.0 * (5.0 / 3.0)));
    CHECK(schedule(Theorem::T1_suff, d1, n, 0.0).log_p == doctest::Approx(lambda * lambda / 2.0).epsilon(1e-10));
    CHECK(schedule(Theorem::T1_nec, d1, n, 0.0).log_p == doctest::Approx(std::sqrt(2.0) * lambda * lambda).epsilon(1e-10));

    TailSpec c2;
    c2.m = 4.0;
    const StandardizedDist d2(c2);
    CHECK(schedule(Theorem::T2_suff, d2, 1e4, 0.5).log_p == doctest::Approx(0.5 * std::log(1e4)).epsilon(1e-14));
    CHECK(schedule(Theorem::T2_nec, d2, 1e4, 0.25).log_p == doctest::Approx(1.25 * std::log(1e4)).epsilon(1e-14));
    CHECK(schedule(Theorem::T2_suff, d2, 1e4, 0.5).scaling.kind == ScalingKind::SqrtN);
    CHECK_THROWS_AS(schedule(Theorem::T2_suff, d2, 1e4, 1.0), SpecificationError);
    CHECK_THROWS_AS(schedule(Theorem::T2_nec, d2, 1e4, 0.0), SpecificationError);

    TailSpec c3;
    c3.class_id = TailClass::III;
    c3.form = TailForm::log_power;
    c3.beta = 0.5;
    const StandardizedDist d3(c3);
    const double g = std::sqrt(std::log(std::sqrt(1e6)));
    CHECK(schedule(Theorem::T3_suff, d3, 1e6, 0.5).log_p == doctest::Approx(0.5 * g).epsilon(1e-12));
    CHECK(schedule(Theorem::T3_nec, d3, 1e6, 0.5).log_p == doctest::Approx(1.5 * g).epsilon(1e-12));

    const StandardizedDist d4(example(1.0, 1.0));
    const DimensionSchedule s4 = schedule(Theorem::T4_nec, d4, 1e6, 0.25);
    CHECK(s4.scaling.kind == ScalingKind::Bn);
    CHECK(s4.log_p == doctest::Approx(1.25 * d4.v_at_log(s4.scaling.log_value)).epsilon(1e-12));
    CHECK_THROWS_AS(schedule(Theorem::T4_suff, d4, 1e6, 1.5), SpecificationError);
    CHECK_THROWS_AS(schedule(Theorem::T2_suff, d4, 1e6, 0.5), SpecificationError);
}

TEST_CASE("theorem names round-trip") {
    for (auto t : {Theorem::T1_suff, Theorem::T1_nec, Theorem::T2_suff, Theorem::T2_nec, Theorem::T3_suff,
                   Theorem::T3_nec, Theorem::T4_suff, Theorem::T4_nec})
        CHECK(parse_theorem(to_string(t)) == t);
    CHECK_THROWS_AS(parse_theorem("T5_suff"), SpecificationError);
}
