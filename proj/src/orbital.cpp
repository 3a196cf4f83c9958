#include "sft/orbital.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sft/errors.hpp"
#include "sft/mobius.hpp"
#include "sft/special_maps.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double max_exponent = 700.0;

void check_finite_mass(double alpha2) {
    if (alpha2 >= pi * pi) throw ParameterError("alpha2 >= pi^2: alpha/sin(alpha) has a pole, total mass is infinite");
}
}  // namespace

OrbitalParams::OrbitalParams(double alpha2_, double sigma2_) : alpha2(alpha2_), sigma2(sigma2_) {
    if (!std::isfinite(alpha2)) throw ParameterError("alpha2 must be finite");
    if (!(sigma2 > 0) || !std::isfinite(sigma2)) throw ParameterError("sigma2 must be positive");
}

double weight_alpha(const CircleDiffeo& phi, const OrbitalParams& p) {
    const double x = 2.0 * p.alpha2 / p.sigma2 * phi.energy();
    if (x > max_exponent) throw NumericError("weight_alpha: exponent exceeds 700");
    return std::exp(x);
}

double partition_ratio_exact(const OrbitalParams& p) {
    check_finite_mass(p.alpha2);
    const double x = 2.0 * p.alpha2 / p.sigma2;
    if (x > max_exponent) throw NumericError("partition_ratio_exact: exponent exceeds 700");
    return alpha_over_sin(p.alpha2) * std::exp(x);
}

double z0(double sigma2) {
    if (!(sigma2 > 0)) throw ParameterError("z0: sigma2 must be positive");
    return 1.0 / std::sqrt(2.0 * pi * sigma2);
}

RunConfig MCOptions::run(std::uint32_t lane) const {
    RunConfig c;
    c.n_samples = samples;
    c.seed = seed;
    c.n_chunks = chunks;
    c.workers = workers;
    c.lane = lane;
    c.unreliable_threshold = unreliable_threshold;
    return c;
}

namespace {
void check_mc(const OrbitalParams& p, const MCOptions& o) {
    check_finite_mass(p.alpha2);
    if (o.grid < 2) throw ParameterError("grid must be at least 2");
    if (p.alpha2 > pi * pi / 4 && !o.allow_strong_elliptic)
        throw ParameterError("alpha2 > pi^2/4: weight variance is uncontrolled; pass the override to run anyway");
}
}  // namespace

MCEstimate mc_partition_ratio(const OrbitalParams& p, const MCOptions& o) {
    check_mc(p, o);
    const int N = o.grid;
    return estimate(o.run(), [&](Stream& s) {
        const GridPath xi = sample_bridge(p.sigma2, 0.0, 1.0, N, s);
        return weight_alpha(ms_map(xi, 0.0), p);
    });
}

BiasProbe mc_partition_ratio_probe(const OrbitalParams& p, const MCOptions& o) {
    check_mc(p, o);
    return bridge_bias_probe(o.run(), p.sigma2, 0.0, o.grid,
                             [&](const GridPath& xi) { return weight_alpha(ms_map(xi, 0.0), p); });
}

std::vector<NamedFunctional> standard_defect_functionals() {
    return {
        {"one", [](const CircleDiffeo&) { return 1.0; }},
        {"phid0", [](const CircleDiffeo& phi) { return phi.dphi(0); }},
        {"expneg", [](const CircleDiffeo& phi) { return std::exp(-phi.energy()); }},
    };
}

std::vector<DefectSides> defect_identity_check(const OrbitalParams& p, const std::vector<NamedFunctional>& Gs,
                                               const MCOptions& o) {
    check_mc(p, o);
    if (Gs.empty()) throw ParameterError("defect_identity_check: no functionals");
    const int N = o.grid;
    const std::size_t m = Gs.size();
    const SmoothMap fa = f_alpha(p.alpha2);
    const double Z0 = z0(p.sigma2);
    const double aos = alpha_over_sin(p.alpha2);
    const double kappa = eight_sin2_half(p.alpha2) / p.sigma2;

    const auto lhs = estimate_many(o.run(1), m, [&](Stream& s, std::span<double> out) {
        const CircleDiffeo P = ms_map(sample_bridge(p.sigma2, 0.0, 1.0, N, s), 0.0);
        const double w = weight_alpha(P, p);
        const CircleDiffeo FP = P.post_compose(fa);
        for (std::size_t k = 0; k < m; ++k) out[k] = Z0 * Gs[k].G(FP) * w;
    });
    const auto rhs = estimate_many(o.run(2), m, [&](Stream& s, std::span<double> out) {
        const CircleDiffeo P = ms_map(sample_bridge(p.sigma2, 0.0, 1.0, N, s), 0.0);
        const double b = std::exp(kappa * P.dphi(0));
        for (std::size_t k = 0; k < m; ++k) out[k] = aos * Z0 * Gs[k].G(P) * b;
    });
    std::vector<DefectSides> res;
    for (std::size_t k = 0; k < m; ++k) res.push_back({Gs[k].name, lhs[k], rhs[k]});
    return res;
}

double schwarzian_partition(double sigma2) {
    if (!(sigma2 > 0)) throw ParameterError("schwarzian_partition: sigma2 must be positive");
    const double x = 2.0 * pi * pi / sigma2;
    if (x > max_exponent) throw NumericError("schwarzian_partition: exponent exceeds 700");
    return std::pow(2.0 * pi / sigma2, 1.5) * std::exp(x);
}

std::vector<LimitRow> schwarzian_limit_table(double sigma2, int kmin, int kmax) {
    if (kmin < 1 || kmax < kmin || kmax > 12) throw ParameterError("limit table: need 1 <= kmin <= kmax <= 12");
    const double Z = schwarzian_partition(sigma2);
    std::vector<LimitRow> rows;
    for (int k = kmin; k <= kmax; ++k) {
        const double delta = std::pow(10.0, -k);
        const double alpha = pi - delta;
        const double v = 4 * pi * delta / sigma2 * partition_ratio_exact({alpha * alpha, sigma2}) * z0(sigma2);
        rows.push_back({k, delta, v, std::abs(v - Z) / Z});
    }
    return rows;
}

SpectralCheck spectral_density_check(double sigma2) {
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;
    const double closed = schwarzian_partition(sigma2);
    const double m = 2 * pi / sigma2;
    // the Gaussian factor is below e^{-45} of its peak past K
    const double K = m + std::sqrt(90.0 / sigma2);
    const double du = K - m;
    const double tail = std::exp(2 * pi * pi / sigma2) *
                        (std::exp(-sigma2 * du * du / 2) / sigma2 +
                         m * std::sqrt(pi / (2 * sigma2)) * std::erfc(du * std::sqrt(sigma2 / 2)));

    auto fE = [sigma2](double E) {
        const double r = 2 * pi * std::sqrt(2 * E);
        return std::exp(r - sigma2 * E) - std::exp(-r - sigma2 * E);
    };
    auto fk = [sigma2](double k) {
        const double g = -sigma2 * k * k / 2;
        return k * (std::exp(2 * pi * k + g) - std::exp(-2 * pi * k + g));
    };
    tanh_sinh<double> ts(15);
    const double qE = ts.integrate(fE, 0.0, K * K / 2, 1e-15);
    const double qk = gauss_kronrod<double, 61>::integrate(fk, 0.0, K, 20, 1e-15);
    return {qE, qk, closed, tail, std::abs(qE - closed) / closed, std::abs(qE - qk) / qk};
}

double haar_regularizer_identity(const OrbitalParams& p) {
    if (p.alpha2 < 0 || p.alpha2 >= pi * pi) throw ParameterError("haar regularizer: need 0 <= alpha2 < pi^2");
    const double a = std::sqrt(p.alpha2);
    return 2 * pi / (pi + a) * std::exp(-2 * (pi * pi - p.alpha2) / p.sigma2);
}

HaarResult haar_regularizer_D(const CircleDiffeo& phi, const OrbitalParams& p, const HaarOptions& o) {
    using boost::math::quadrature::gauss_kronrod;
    if (p.alpha2 < 0 || p.alpha2 >= pi * pi) throw ParameterError("haar regularizer: need 0 <= alpha2 < pi^2");
    if (o.n_theta < 1 || o.n_v < 4 || o.table < 4 || o.max_depth < 0) throw ParameterError("haar regularizer: quadrature too coarse");
    const double alpha = std::sqrt(p.alpha2);
    const double c = 2 * (pi * pi - p.alpha2) / p.sigma2;
    const double pref = 2 * pi / (pi + alpha);

    // g(s) = phi'(phi^{-1}(s)) on a uniform periodic table
    const int M = o.table;
    const double th0 = phi.theta();
    std::vector<double> g(M + 1);
    double gmin = INFINITY, gmax = 0.0;
    for (int j = 0; j < M; ++j) {
        g[j] = phi.deriv(phi.inverse(th0 + double(j) / M));
        gmin = std::min(gmin, g[j]);
        gmax = std::max(gmax, g[j]);
    }
    g[M] = g[0];
    auto g_at = [&](double s) {
        double x = (s - th0) - std::floor(s - th0);
        x *= M;
        const int j = std::min(static_cast<int>(x), M - 1);
        const double w = x - j;
        return g[j] + w * (g[j + 1] - g[j]);
    };

    // exp(-c E) with x = c (u - 1), u = (1 + rho^2) / (1 - rho^2); then
    // c E = (x + 2c)/2 * avg_v g(phi_{-z}(v)) |e^{2 pi i v} + z|^2.
    // gmin (x + c) <= c E <= gmax (x + c) bounds the tail relative to the total.
    const double X = std::max(0.0, (std::log(gmax / (gmin * o.tail_target)) + c * (gmax - gmin)) / gmin);
    const double tail_abs = std::exp(-gmin * (c + X)) / gmin;

    // the integrand changes scale near x ~ c and again near x ~ 1
    std::vector<double> cuts{0.0};
    for (double b = 2e-3 * c; b < X; b *= 10) cuts.push_back(b);
    for (double b = 1.0; b < X; b *= 4)
        if (b > cuts.back()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(X);

    // phi_{-z}(v) = v + arg(1 + z w_v) / pi and |e^{2 pi i v} + z| = |1 + z w_v|, w_v = e^{-2 pi i v}
    std::vector<std::complex<double>> wv(o.n_v);
    for (int v = 0; v < o.n_v; ++v) wv[v] = std::polar(1.0, -2 * pi * double(v) / o.n_v);

    double total = 0.0;
    for (int q = 0; q < o.n_theta; ++q) {
        const double theta = double(q) / o.n_theta;
        auto integrand = [&](double x) {
            const double r = std::sqrt(x / (x + 2 * c));
            const std::complex<double> z = std::polar(r, 2 * pi * theta);
            double acc = 0.0;
            for (int v = 0; v < o.n_v; ++v) {
                const std::complex<double> m = 1.0 + z * wv[v];
                acc += g_at(double(v) / o.n_v + std::arg(m) / pi) * std::norm(m);
            }
            return std::exp(-(x + 2 * c) / 2 * acc / o.n_v);
        };
        // crude pass first, then refine each piece to x_tol of the whole integral
        std::vector<double> crude(cuts.size() - 1, 0.0);
        double whole = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            crude[k] = gauss_kronrod<double, 31>::integrate(integrand, cuts[k], cuts[k + 1], 0, 0.0);
            whole += crude[k];
        }
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (!(crude[k] > 0)) continue;
            const double tol = std::min(1e-2, o.x_tol * whole / crude[k]);
            total += gauss_kronrod<double, 31>::integrate(integrand, cuts[k], cuts[k + 1], o.max_depth, tol);
        }
    }
    total /= o.n_theta;
    const double tail_rel = total > 0 ? tail_abs / total : INFINITY;
    return {pref * total, pref, tail_rel, tail_rel > 1e-8};
}

}  // namespace sft
