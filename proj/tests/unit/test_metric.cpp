#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sft/errors.hpp"
#include "sft/metric.hpp"
#include "sft/orbital.hpp"

using namespace sft;
using std::numbers::pi;

namespace {

PeriodicFunction one() { return constant_function(1.0); }

MetricProfile cos_profile(double eps = 0.3) { return MetricProfile::from_rho(one() + cos_mode(1, eps)); }

// composite Simpson on [0,1], independent of the library quadrature
template <class F>
double simpson(F f, int n = 4096) {
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(double(i) / n);
    return s / (3.0 * n);
}

}  // namespace

TEST_CASE("metric profile") {
    CHECK(cos_profile().sigma2_rho() == doctest::Approx(1.0).epsilon(1e-10));
    const MetricProfile r = MetricProfile::from_rho(2 * pi * (one() + cos_mode(1, 0.2)));
    CHECK(r.sigma2_rho() == doctest::Approx(2 * pi).epsilon(1e-10));
    CHECK(MetricProfile::constant(3.0).is_constant());
    const MetricProfile w = MetricProfile::from_inverse(one() + sin_mode(2, 0.4));
    for (double t : {0.1, 0.45}) {
        CHECK(w.rho(t) == doctest::Approx(1 / (1 + 0.4 * std::sin(4 * pi * t))).epsilon(1e-15));
        const double h = 1e-5;
        CHECK(w.drho(t) == doctest::Approx((w.rho(t + h) - w.rho(t - h)) / (2 * h)).epsilon(1e-7));
        CHECK(w.d2rho(t) == doctest::Approx((w.drho(t + h) - w.drho(t - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(MetricProfile::from_rho(cos_mode(1)), ParameterError);
    CHECK_THROWS_AS(MetricProfile::constant(0.0), ParameterError);
    CHECK_THROWS_AS(cos_profile().scaled(-1.0), ParameterError);
}

TEST_CASE("reparametrisation h") {
    for (double t : {0.0, 0.3, 0.9}) CHECK(reparam_h(MetricProfile::constant(2.0), t) == doctest::Approx(t).epsilon(1e-14));
    const MetricProfile r = MetricProfile::from_rho(2.0 * (one() + sin_mode(1, 0.5)));
    CHECK(reparam_h(r, 0.0) == 0.0);
    CHECK(reparam_h(r, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // fourth-order central difference
    for (double t : {0.1, 0.5, 0.77}) {
        const double h = 1e-3;
        auto H = [&](double x) { return reparam_h(r, x); };
        const double d = (8 * (H(t + h) - H(t - h)) - (H(t + 2 * h) - H(t - 2 * h))) / (12 * h);
        CHECK(d == doctest::Approx(r.rho(t) / r.sigma2_rho()).epsilon(1e-10));
    }
}

TEST_CASE("normaliser: three routes agree") {
    for (const MetricProfile& r : {cos_profile(), MetricProfile::from_rho(2.0 * (one() + sin_mode(2, 0.4))),
                                   MetricProfile::from_inverse(one() + cos_mode(1, 0.5) + sin_mode(3, 0.1))}) {
        const NormaliserRoutes n = normaliser_routes(r);
        CHECK(n.schwarzian == doctest::Approx(n.gradient).epsilon(1e-6));
        CHECK(n.second == doctest::Approx(n.gradient).epsilon(1e-6));
    }
    const NormaliserRoutes n = normaliser_routes(cos_profile());
    CHECK(n.gradient == doctest::Approx(1.02324626091157091).epsilon(1e-12));
    const double oracle = 0.5 * simpson([](double t) {
        const double r = 1 + 0.3 * std::cos(2 * pi * t), d = -0.6 * pi * std::sin(2 * pi * t);
        return d * d / (r * r * r);
    });
    CHECK(std::log(normaliser_C(cos_profile())) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(normaliser_C(MetricProfile::constant(2.0)) == 1.0);
}

TEST_CASE("normaliser scaling") {
    const double g = std::log(normaliser_C(cos_profile()));
    for (double lambda : {0.5, 2.0, 7.0})
        CHECK(std::log(normaliser_C(cos_profile().scaled(lambda))) == doctest::Approx(g / lambda).epsilon(1e-12));
}

TEST_CASE("metric partition function") {
    for (double s2 : {1.0, 2.0, 2 * pi}) CHECK(partition_Z_metric(MetricProfile::constant(s2)) == schwarzian_partition(s2));
    CHECK(log_partition_Z_metric(cos_profile()) == doctest::Approx(23.5192706627043064).epsilon(1e-12));
    CHECK(log_schwarzian_partition(1.0) == doctest::Approx(22.4960244017927355).epsilon(1e-14));
    const MetricProfile r = MetricProfile::from_rho(2 * pi * (one() + cos_mode(1, 0.2)));
    CHECK(partition_Z_metric(r) == doctest::Approx(normaliser_C(r) * schwarzian_partition(r.sigma2_rho())).epsilon(1e-14));
    for (double tau0 : {0.1, 0.37, 0.5})
        CHECK(partition_Z_metric(r.rotated(tau0)) == doctest::Approx(partition_Z_metric(r)).epsilon(1e-10));
}

TEST_CASE("derivatives of log Z(s)") {
    for (double s : {0.7, 2.0}) {
        const double h = 1e-4, h1 = 1e-5;
        auto L = [](double x) { return log_schwarzian_partition(x); };
        CHECK(log_schwarzian_partition_derivative(0, s) == L(s));
        CHECK(log_schwarzian_partition_derivative(1, s) == doctest::Approx((L(s + h1) - L(s - h1)) / (2 * h1)).epsilon(1e-8));
        CHECK(log_schwarzian_partition_derivative(2, s) ==
              doctest::Approx((L(s + h) - 2 * L(s) + L(s - h)) / (h * h)).epsilon(1e-6));
        // -3/(2s) - 2 pi^2 / s^2 differentiated twice more
        CHECK(log_schwarzian_partition_derivative(3, s) == doctest::Approx(-3 / (s * s * s) - 12 * pi * pi / std::pow(s, 4)).epsilon(1e-14));
    }
}

TEST_CASE("truncated correlators") {
    CHECK(truncated_correlator(1, 1.0) == doctest::Approx(21.2392088021787172).epsilon(1e-15));
    CHECK(truncated_correlator(1, 2.0) == doctest::Approx(22.7392088021787172).epsilon(1e-15));
    CHECK(truncated_correlator(2, 1.0) == doctest::Approx(40.9784176043574345).epsilon(1e-15));
    CHECK(truncated_correlator(3, 1.0) == doctest::Approx(121.435252813072303).epsilon(1e-15));
    CHECK_THROWS_AS(truncated_correlator(0, 1.0), ParameterError);
}

TEST_CASE("one-point function from the closed form") {
    for (double s2 : {0.5, 1.0, 2.0})
        CHECK(correlator_formula(s2, {one()}) == doctest::Approx(2 * pi * pi + 1.5 * s2).epsilon(1e-14));
}

TEST_CASE("functional derivatives match the formula") {
    const std::vector<std::vector<PeriodicFunction>> k1{{one()}, {cos_mode(1)}, {one() + cos_mode(2, 0.5) + sin_mode(1, 0.3)}};
    const std::vector<std::vector<PeriodicFunction>> k2{
        {one(), sin_mode(1)}, {cos_mode(1), cos_mode(1)}, {one() + cos_mode(1, 0.3), cos_mode(1) + sin_mode(2, 0.2)}};
    for (double s2 : {1.0, 2.0}) {
        for (const auto& h : k1) CHECK(functional_derivative_check(1, s2, h).rel_gap <= 1e-4);
        for (const auto& h : k2) CHECK(functional_derivative_check(2, s2, h).rel_gap <= 1e-4);
    }
    const FdCheck c = functional_derivative_check(1, 1.0, {one()});
    CHECK(c.numeric == doctest::Approx(2 * pi * pi + 1.5).epsilon(1e-4));
}

TEST_CASE("second order finite differences") {
    const std::vector<PeriodicFunction> h{one() + cos_mode(1, 0.3), cos_mode(1) + sin_mode(2, 0.2)};
    const double exact = correlator_formula(1.0, h);
    std::vector<double> err;
    for (double step : {4e-2, 2e-2, 1e-2}) err.push_back(std::abs(fd_mixed_derivative(1.0, h, step) - exact));
    for (int i = 0; i + 1 < 3; ++i) CHECK(std::log2(err[i] / err[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("smeared two-point function") {
    CHECK(two_point_correlator_smeared(one(), one(), 1.0) == doctest::Approx(449.603990542545901).epsilon(1e-14));
    for (double s2 : {0.5, 1.0, 2.0}) {
        const double s4 = s2 * s2;
        CHECK(two_point_correlator_smeared(one(), one(), s2) ==
              doctest::Approx(4 * std::pow(pi, 4) + 6 * pi * pi * s2 + 0.75 * s4).epsilon(1e-14));
        // only the delta'' term survives
        CHECK(two_point_correlator_smeared(one(), cos_mode(1), s2) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
        CHECK(two_point_correlator_smeared(cos_mode(1), cos_mode(1), s2) ==
              doctest::Approx(-2 * s2 * (2 * pi * pi + 1.5 * s2) * 0.5 + s2 * 4 * pi * pi * 0.5).epsilon(1e-12));
    }
}

TEST_CASE("two-point function is the second moment") {
    // <S S> = <S; S> + <S><S>, both sides from finite differences of log Z
    const std::vector<std::pair<PeriodicFunction, PeriodicFunction>> sets{
        {one(), one()}, {cos_mode(1), cos_mode(1)}, {one() + cos_mode(1, 0.3), one() + sin_mode(2, 0.4)}};
    for (double s2 : {1.0, 2.0})
        for (const auto& [g1, g2] : sets) {
            const double moment = fd_mixed_derivative(s2, {g1, g2}, 1e-4) +
                                  fd_mixed_derivative(s2, {g1}, 1e-4) * fd_mixed_derivative(s2, {g2}, 1e-4);
            CHECK(two_point_correlator_smeared(g1, g2, s2) == doctest::Approx(moment).epsilon(1e-4));
        }
}

TEST_CASE("cumulants at separated points") {
    // bumps with disjoint supports: the delta terms drop, so the smeared two-point
    // function is the constant term times the two masses
    const PeriodicFunction b1 = smooth_bump(0.2, 0.1), b2 = smooth_bump(0.7, 0.1);
    const double m1 = periodic_trapezoid(b1.f), m2 = periodic_trapezoid(b2.f);
    for (double s2 : {1.0, 2.0}) {
        const double s4 = s2 * s2;
        const double c = 4 * std::pow(pi, 4) + 10 * pi * pi * s2 + 3.75 * s4;
        CHECK(two_point_correlator_smeared(b1, b2, s2) == doctest::Approx(c * m1 * m2).epsilon(1e-12));
        // constant term = truncated two-point + square of the one-point function
        const double t1 = truncated_correlator(1, s2);
        CHECK(c == doctest::Approx(truncated_correlator(2, s2) + t1 * t1).epsilon(1e-14));
    }
}
