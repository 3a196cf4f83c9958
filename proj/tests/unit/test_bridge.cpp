#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sft/bridge.hpp"
#include "sft/errors.hpp"
#include "sft/mobius.hpp"
#include "sft/special_maps.hpp"

using namespace sft;
using std::numbers::pi;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    // least-squares slope of log y against log x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GridPath path_from(const std::function<double(double)>& xi, int N) {
    std::vector<double> v(N + 1);
    for (int i = 0; i <= N; ++i) v[i] = xi(double(i) / N) - xi(0.0);
    return GridPath(std::move(v));
}

}  // namespace

TEST_CASE("bridge endpoints are exact") {
    for (std::uint32_t lane = 0; lane < 200; ++lane) {
        Stream s(4, 0, lane);
        const double a = 0.37 * (lane % 7) - 1.0;
        const GridPath p = sample_bridge(1.3, a, 2.0, 64, s);
        CHECK(p[0] == 0.0);
        CHECK(p[64] == a);
    }
}

TEST_CASE("bridge covariance and variance") {
    // nodes T/4 and T/2 of a 16-step grid; exact law at nodes
    const int n = 1000000, N = 16;
    double s1 = 0, s2 = 0, s12 = 0, q1 = 0, q2 = 0, c4 = 0;
    std::vector<double> v(N + 1);
    Stream st(12, 0, 0);
    for (int k = 0; k < n; ++k) {
        sample_bridge_into(st, 1.0, 0.0, 1.0, v);
        const double x = v[4], y = v[8];
        s1 += x;
        s2 += y;
        s12 += x * y;
        q1 += x * x;
        q2 += y * y;
        c4 += x * x * y * y;
    }
    const double cov = s12 / n - (s1 / n) * (s2 / n);
    // E[x^2 y^2] - cov^2 bounds the variance of the product
    const double se_cov = std::sqrt((c4 / n - cov * cov) / n);
    CHECK(std::abs(cov - 0.125) <= 4 * se_cov);
    const double var = q2 / n - (s2 / n) * (s2 / n);
    const double se_var = 0.25 * std::sqrt(2.0 / n);
    CHECK(std::abs(var - 0.25) <= 4 * se_var);
    CHECK(std::abs(s2 / n) <= 4 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("Gaussian marginal moments") {
    const int n = 100000, N = 32;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    std::vector<double> v(N + 1);
    Stream st(2, 3, 1);
    const double a = 0.8, t = 0.25, s2 = 2.0;
    for (int k = 0; k < n; ++k) {
        sample_bridge_into(st, s2, a, 1.0, v);
        const double x = v[8];
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    const double mean = a * t, var = s2 * t * (1 - t);
    const double sd = std::sqrt(var);
    CHECK(std::abs(m1 - mean) <= 4 * sd / std::sqrt(double(n)));
    CHECK(std::abs(m2 - m1 * m1 - var) <= 4 * var * std::sqrt(2.0 / n));
    // standardised third and fourth moments of a normal: 0 and 3
    const double c3 = m3 / n - 3 * m1 * m2 + 2 * m1 * m1 * m1;
    CHECK(std::abs(c3 / (sd * sd * sd)) <= 4 * std::sqrt(6.0 / n));
}

TEST_CASE("bridge mass") {
    CHECK(bridge_mass(1, 0, 1) == doctest::Approx(0.398942280401432678).epsilon(1e-15));
    CHECK(bridge_mass(1, 1, 2) == doctest::Approx(0.219695644733861199).epsilon(1e-15));
    CHECK(bridge_mass(2, 0, 1) == doctest::Approx(0.282094791773878143).epsilon(1e-15));
    // Chapman-Kolmogorov by composite Simpson on [-40, 40]
    const double s2 = 1.3, T1 = 0.4, T2 = 0.9, a = 0.7;
    const int m = 20000;
    const double lo = -40, h = 80.0 / m;
    double acc = 0;
    for (int i = 0; i <= m; ++i) {
        const double b = lo + i * h;
        const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        acc += w * bridge_mass(s2, b, T1) * bridge_mass(s2, a - b, T2);
    }
    CHECK(acc * h / 3 == doctest::Approx(bridge_mass(s2, a, T1 + T2)).epsilon(1e-8));
}

TEST_CASE("MS map of simple paths") {
    const CircleDiffeo id = ms_map(GridPath(std::vector<double>(65, 0.0)));
    for (int i = 0; i <= 64; ++i) CHECK(id.node(i) == doctest::Approx(i / 64.0).epsilon(1e-15));
    CHECK(id.energy() == doctest::Approx(1.0).epsilon(1e-15));

    const double c = 1.5;
    const int N = 1 << 12;
    const CircleDiffeo phi = ms_map(path_from([c](double t) { return c * t; }, N));
    double worst = 0;
    for (int i = 0; i <= N; ++i) {
        const double t = double(i) / N;
        worst = std::max(worst, std::abs(phi.node(i) - std::expm1(c * t) / std::expm1(c)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("MS bijection on grids") {
    Stream s(77, 0, 0);
    for (int k = 0; k < 5; ++k) {
        const GridPath xi = sample_bridge(2.0, 0.3 * k, 1.0, 512, s);
        const CircleDiffeo phi = ms_map(xi, 0.1 * k);
        const GridPath back = ms_inverse(phi);
        for (int i = 0; i <= 512; ++i) CHECK(std::abs(back[i] - xi[i]) <= 1e-12);
        const CircleDiffeo again = ms_map(back, phi.theta());
        for (int i = 0; i <= 512; ++i) CHECK(std::abs(again.node(i) - phi.node(i)) <= 1e-12);
    }
    const GridPath zero = ms_inverse(CircleDiffeo::identity(32));
    for (int i = 0; i <= 32; ++i) CHECK(zero[i] == 0.0);
}

TEST_CASE("MS inverse of Moebius and composed maps") {
    const MobiusElement m(0.3, 0.0);
    const int N = 1024;
    const CircleDiffeo phi = CircleDiffeo::from_map(mobius_map(m), N);
    const GridPath xi = ms_inverse(phi);
    for (int i = 0; i <= N; i += 17) {
        const double t = double(i) / N;
        const double exact = std::log(mobius_derivative(m, t) / mobius_derivative(m, 0.0));
        CHECK(std::abs(xi[i] - exact) <= 1e-10);
    }
    // f o phi adds log f'(phi) - log f'(phi(0))
    Stream s(8, 0, 0);
    const CircleDiffeo p = ms_map(sample_bridge(1.0, 0.0, 1.0, N, s));
    const SmoothMap f = f_alpha(1.0);
    const GridPath a = ms_inverse(p), b = ms_inverse(p.post_compose(f));
    for (int i = 0; i <= N; i += 13) {
        const double expect = a[i] + std::log(f.d1(p.node(i))) - std::log(f.d1(p.node(0)));
        CHECK(std::abs(b[i] - expect) <= 1e-10);
    }
}

TEST_CASE("energy") {
    CHECK(energy(CircleDiffeo::identity(16)) == doctest::Approx(1.0).epsilon(1e-15));
    const MobiusElement m(0.5, 0.2);
    const CircleDiffeo phi = CircleDiffeo::from_map(mobius_map(m), 1 << 14);
    CHECK(std::abs(energy(phi) - 5.0 / 3.0) <= 1e-6);
    Stream s(19, 0, 0);
    for (int k = 0; k < 50; ++k) CHECK(energy(ms_map(sample_bridge(3.0, 0.0, 1.0, 128, s))) >= 1.0);
}

TEST_CASE("energy of a smooth path converges at second order") {
    // the trapezoid rule on a smooth path: error ~ N^-2
    auto xi = [](double t) { return std::sin(2 * pi * t) + t; };
    const double ref = energy(ms_map(path_from(xi, 1 << 16)));
    std::vector<double> Ns, err;
    for (int N : {32, 64, 128, 256, 512}) {
        Ns.push_back(N);
        err.push_back(std::abs(energy(ms_map(path_from(xi, N))) - ref));
    }
    CHECK(slope(Ns, err) == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("energy of Brownian paths converges at first order") {
    // root-mean-square change under Levy midpoint refinement
    const std::vector<int> Ns{32, 64, 128, 256, 512};
    std::vector<double> sq(Ns.size(), 0.0);
    const int P = 4000;
    for (int p = 0; p < P; ++p) {
        Stream s(9, 1, p);
        std::vector<double> c(Ns[0] + 1);
        sample_bridge_into(s, 1.0, 0.0, 1.0, c);
        for (std::size_t k = 0; k < Ns.size(); ++k) {
            std::vector<double> f(2 * c.size() - 1);
            refine_midpoint(c, 1.0, 1.0, s, f);
            const double d = energy(ms_map(GridPath(f))) - energy(ms_map(GridPath(c)));
            sq[k] += d * d;
            c = std::move(f);
        }
    }
    std::vector<double> x, rms;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
        x.push_back(Ns[k]);
        rms.push_back(std::sqrt(sq[k] / P));
    }
    const double sl = -slope(x, rms);
    CHECK(sl >= 0.9);
    CHECK(sl <= 1.1);
}

TEST_CASE("Levy refinement keeps the coarse nodes and the bridge law") {
    Stream s(5, 0, 0);
    std::vector<double> c(9), f(17);
    sample_bridge_into(s, 1.0, 0.4, 1.0, c);
    refine_midpoint(c, 1.0, 1.0, s, f);
    for (int i = 0; i <= 8; ++i) CHECK(f[2 * i] == c[i]);
    // variance at t = 1/16 of the refined bridge: t(1-t)
    const int n = 200000;
    double m = 0, q = 0;
    for (int k = 0; k < n; ++k) {
        sample_bridge_into(s, 1.0, 0.0, 1.0, c);
        refine_midpoint(c, 1.0, 1.0, s, f);
        m += f[1];
        q += f[1] * f[1];
    }
    const double var = q / n - (m / n) * (m / n), exact = (1.0 / 16) * (15.0 / 16);
    CHECK(std::abs(var - exact) <= 4 * exact * std::sqrt(2.0 / n));
}

TEST_CASE("cross ratio") {
    const CircleDiffeo id = CircleDiffeo::identity(64);
    CHECK(cross_ratio(id, 0.0, 0.5) == doctest::Approx(pi).epsilon(1e-14));
    CHECK_THROWS_AS(cross_ratio(id, 0.25, 0.25), SingularArgumentError);
    CHECK_THROWS_AS(cross_ratio(id, 0.25, 1.25), SingularArgumentError);

    // invariance under post-composition with Moebius maps, at grid nodes
    Stream s(31, 0, 0);
    const int N = 256;
    const CircleDiffeo phi = ms_map(sample_bridge(1.0, 0.0, 1.0, N, s));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 10; ++k) {
        const MobiusElement m(std::polar(0.9 * u(rng), 2 * pi * u(rng)), u(rng));
        const CircleDiffeo mp = phi.post_compose(mobius_map(m));
        for (auto [i, j] : {std::pair{0, 100}, std::pair{17, 200}, std::pair{60, 61}}) {
            const double a = cross_ratio(phi, double(i) / N, double(j) / N);
            const double b = cross_ratio(mp, double(i) / N, double(j) / N);
            CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
        }
    }
    // (t - s) cr -> 1 as t -> s on a smooth map
    const CircleDiffeo sm = CircleDiffeo::from_map(sine_perturbation(0.4, 1), 1 << 16);
    const double s0 = 0.3;
    const double close = (1.0 / 16) * cross_ratio(sm, s0, s0 + 1.0 / 16);
    const double closer = (1.0 / 1024) * cross_ratio(sm, s0, s0 + 1.0 / 1024);
    CHECK(std::abs(closer - 1) < std::abs(close - 1));
    CHECK(std::abs(closer - 1) < 1e-3);
}

TEST_CASE("bias probe on deterministic functionals") {
    RunConfig cfg;
    cfg.n_samples = 2000;
    cfg.seed = 3;
    // linear in the node values: no grid bias at all
    const BiasProbe lin = bridge_bias_probe(cfg, 1.0, 0.0, 64, [](const GridPath& p) { return p[p.N() / 2]; });
    CHECK(std::abs(lin.difference.mean) <= 1e-15);
    // energy at N = 2^11 vs 2^12: the fine estimate is closer to the extrapolation
    cfg.n_samples = 400;
    const BiasProbe e = bridge_bias_probe(cfg, 1.0, 0.0, 1 << 11, [](const GridPath& p) { return energy(ms_map(p)); });
    CHECK(std::abs(e.fine.mean - e.richardson) < std::abs(e.coarse.mean - e.richardson));
}

TEST_CASE("parameter validation") {
    Stream s(1, 0, 0);
    CHECK_THROWS_AS(sample_bridge(0.0, 0, 1, 8, s), ParameterError);
    CHECK_THROWS_AS(sample_bridge(1.0, 0, -1, 8, s), ParameterError);
    CHECK_THROWS_AS(sample_bridge(1.0, 0, 1, 1, s), ParameterError);
    CHECK_THROWS_AS(GridPath({1.0, 2.0, 3.0}), ParameterError);
    CHECK_THROWS_AS(bridge_mass(-1, 0, 1), ParameterError);
}
