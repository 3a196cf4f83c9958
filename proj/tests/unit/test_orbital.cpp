#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sft/errors.hpp"
#include "sft/mobius.hpp"
#include "sft/orbital.hpp"

using namespace sft;
using std::numbers::pi;

TEST_CASE("exact partition ratio") {
    CHECK(partition_ratio_exact({0.0, 1.0}) == 1.0);
    // 30-digit reference values
    CHECK(partition_ratio_exact({-1.0, 1.0}) == doctest::Approx(0.115159245896436902).epsilon(1e-14));
    CHECK(partition_ratio_exact({pi * pi / 16, 2.0}) == doctest::Approx(2.05825675700125683).epsilon(1e-14));
    CHECK(partition_ratio_exact({pi * pi / 4, 4.0}) == doctest::Approx(5.39397858968191035).epsilon(1e-14));
    CHECK(partition_ratio_exact({1.0, 2.0}) == doctest::Approx(3.23039282106633181).epsilon(1e-14));
    CHECK_THROWS_AS(partition_ratio_exact({pi * pi, 1.0}), ParameterError);
    CHECK_THROWS_AS(partition_ratio_exact({12.0, 1.0}), ParameterError);
}

TEST_CASE("exact ratio is smooth through alpha2 = 0") {
    // second derivative in alpha2 at 0 from the product of the two series
    for (double s2 : {1.0, 3.0}) {
        const double h = 1e-3;
        auto f = [s2](double x) { return partition_ratio_exact({x, s2}); };
        const double fd = (f(h) - 2 * f(0) + f(-h)) / (h * h);
        const double series = 2 * (7.0 / 360 + (1.0 / 6) * (2 / s2) + 2 / (s2 * s2));
        CHECK(fd == doctest::Approx(series).epsilon(1e-6));
    }
}

TEST_CASE("Z0 normaliser") {
    CHECK(z0(1 / (2 * pi)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(z0(1.0) == doctest::Approx(0.398942280401432678).epsilon(1e-15));
    CHECK(z0(2.0) == doctest::Approx(0.282094791773878143).epsilon(1e-15));
}

TEST_CASE("orbital weight") {
    const CircleDiffeo id = CircleDiffeo::identity(64);
    CHECK(weight_alpha(id, {0.0, 1.0}) == 1.0);
    CHECK(weight_alpha(id, {pi * pi / 4, 1.0}) == doctest::Approx(std::exp(pi * pi / 2)).epsilon(1e-14));
    Stream s(6, 0, 0);
    for (int k = 0; k < 30; ++k) {
        const CircleDiffeo phi = ms_map(sample_bridge(1.0, 0.0, 1.0, 256, s));
        CHECK(weight_alpha(phi, {-1.0, 1.0}) <= std::exp(-2.0) * (1 + 1e-15));
        CHECK(weight_alpha(phi, {2.0, 1.5}) == weight_alpha(phi.shifted(0.37), {2.0, 1.5}));
        for (int r : {1, 17, 128})
            CHECK(weight_alpha(phi, {2.0, 1.5}) == doctest::Approx(weight_alpha(phi.rotated(r), {2.0, 1.5})).epsilon(1e-14));
    }
    CHECK_THROWS_AS(weight_alpha(id, {9.0, 0.01}), NumericError);
}

TEST_CASE("Monte Carlo partition ratio") {
    MCOptions o;
    o.grid = 256;
    o.samples = 1000;
    const MCEstimate flat = mc_partition_ratio({0.0, 1.0}, o);
    CHECK(flat.mean == 1.0);
    CHECK(flat.std_error == 0.0);

    o.grid = 1024;
    o.samples = 20000;
    o.seed = 4;
    for (auto p : {OrbitalParams(-0.5, 2.0), OrbitalParams(1.0, 4.0)}) {
        const BiasProbe b = mc_partition_ratio_probe(p, o);
        const double exact = partition_ratio_exact(p);
        const double allowance = std::abs(b.coarse.mean - b.richardson);
        CHECK(allowance <= 0.01 * exact);
        CHECK(std::abs(b.coarse.mean - exact) <= 3 * b.coarse.std_error + allowance);
    }
}

TEST_CASE("ratio consistency across alpha") {
    MCOptions o;
    o.grid = 1024;
    o.samples = 20000;
    o.seed = 8;
    const OrbitalParams p1(0.5, 3.0), p2(-1.0, 3.0);
    const BiasProbe a = mc_partition_ratio_probe(p1, o);
    o.seed = 9;
    const BiasProbe b = mc_partition_ratio_probe(p2, o);
    const double r = b.richardson / a.richardson;
    const double se = r * std::hypot(a.coarse.std_error / a.coarse.mean, b.coarse.std_error / b.coarse.mean);
    CHECK(std::abs(r - partition_ratio_exact(p2) / partition_ratio_exact(p1)) <= 3 * se);
}

TEST_CASE("Monte Carlo guards") {
    MCOptions o;
    o.samples = 10;
    CHECK_THROWS_AS(mc_partition_ratio({pi * pi, 1.0}, o), ParameterError);
    CHECK_THROWS_AS(mc_partition_ratio({3.0, 1.0}, o), ParameterError);
    o.allow_strong_elliptic = true;
    o.grid = 16;
    CHECK_NOTHROW(mc_partition_ratio({3.0, 1.0}, o));
    o.grid = 1;
    CHECK_THROWS_AS(mc_partition_ratio({0.5, 1.0}, o), ParameterError);
    CHECK_THROWS_AS(OrbitalParams(1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(OrbitalParams(NAN, 1.0), ParameterError);
}

TEST_CASE("defect identity") {
    MCOptions o;
    o.grid = 128;
    o.samples = 2000;
    for (const auto& s : defect_identity_check({0.0, 1.0}, standard_defect_functionals(), o)) {
        // with alpha = 0 both sides are the same estimator on different lanes
        CHECK(std::abs(s.lhs.mean - s.rhs.mean) <= 3 * std::hypot(s.lhs.std_error, s.rhs.std_error));
    }
    o.grid = 1024;
    o.samples = 20000;
    for (const auto& s : defect_identity_check({1.0, 2.0}, standard_defect_functionals(), o))
        CHECK(std::abs(s.lhs.mean - s.rhs.mean) <= 3 * std::hypot(s.lhs.std_error, s.rhs.std_error));
}

TEST_CASE("Schwarzian partition function") {
    CHECK(schwarzian_partition(2 * pi) == doctest::Approx(std::exp(pi)).epsilon(1e-14));
    CHECK(schwarzian_partition(2.0) == doctest::Approx(std::pow(pi, 1.5) * std::exp(pi * pi)).epsilon(1e-14));
    CHECK(schwarzian_partition(1.0) == doctest::Approx(5887070849.29510510).epsilon(1e-14));
    for (double s2 : {1.0, 2.0, 4.0, 2 * pi}) {
        const auto rows = schwarzian_limit_table(s2);
        REQUIRE(rows.size() == 5);
        // gap = delta (1/pi + 4 pi / sigma2) + O(delta^2)
        const double c1 = 1 / pi + 4 * pi / s2;
        for (const auto& r : rows)
            if (r.k >= 4) CHECK(r.rel_gap / r.delta == doctest::Approx(c1).epsilon(1e-2));
        CHECK(rows.back().rel_gap <= 1e-4);
    }
}

TEST_CASE("spectral density identity") {
    for (double s2 : {2.0, 4.0}) {
        const SpectralCheck c = spectral_density_check(s2);
        CHECK(c.rel_gap <= 1e-8);
        CHECK(c.form_gap <= 1e-10);
        CHECK(c.tail_bound <= 1e-12 * c.closed_form);
    }
    CHECK(spectral_density_check(2.0).closed_form == doctest::Approx(107656.322154826746).epsilon(1e-14));
    CHECK(spectral_density_check(4.0).closed_form == doctest::Approx(273.739317757482415).epsilon(1e-14));
}

TEST_CASE("D^alpha at the identity") {
    for (auto p : {OrbitalParams(1.0, 1.0), OrbitalParams(4.0, 2.0), OrbitalParams(0.0, 3.0), OrbitalParams(9.0, 1.0)}) {
        const HaarResult r = haar_regularizer_D(CircleDiffeo::identity(256), p);
        CHECK(r.value == doctest::Approx(haar_regularizer_identity(p)).epsilon(1e-8));
        CHECK_FALSE(r.accuracy_warning);
    }
    CHECK(haar_regularizer_identity({1.0, 1.0}) == doctest::Approx(2.99896909732908199e-8).epsilon(1e-14));
}

TEST_CASE("D^alpha bound and limit") {
    const double a = pi - 0.05;
    Stream s(13, 0, 0);
    for (int k = 0; k < 2; ++k) {
        const CircleDiffeo phi = ms_map(sample_bridge(1.0, 0.0, 1.0, 256, s));
        const HaarResult r = haar_regularizer_D(phi, {a * a, 1.0});
        CHECK(r.value <= r.bound);
    }
    const double b = pi - 1e-4;
    const CircleDiffeo smooth = CircleDiffeo::from_map(sine_perturbation(0.3, 1), 1024);
    CHECK(std::abs(haar_regularizer_D(smooth, {b * b, 1.0}).value - 1.0) <= 1e-2);
    // Moebius maps are a fixed point of the Haar average
    const CircleDiffeo mob = CircleDiffeo::from_map(mobius_map(MobiusElement({0.3, 0.2}, 0.1)), 2048);
    const OrbitalParams p(2.0, 1.0);
    CHECK(haar_regularizer_D(mob, p).value == doctest::Approx(haar_regularizer_identity(p)).epsilon(1e-4));
    CHECK_THROWS_AS(haar_regularizer_D(smooth, {-1.0, 1.0}), ParameterError);
}
