#include "sft/metric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "sft/errors.hpp"
#include "sft/finite_difference.hpp"
#include "sft/orbital.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;
constexpr int quad_nodes = 1 << 10;

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-15);
}

// single 31-point pass; enough on the short stencil intervals
double gk_short(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0);
}

double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// all set partitions of {0..k-1}
void partitions(int k, int i, std::vector<std::vector<int>>& cur, std::vector<std::vector<std::vector<int>>>& out) {
    if (i == k) {
        out.push_back(cur);
        return;
    }
    for (auto& block : cur) {
        block.push_back(i);
        partitions(k, i + 1, cur, out);
        block.pop_back();
    }
    cur.push_back({i});
    partitions(k, i + 1, cur, out);
    cur.pop_back();
}
}  // namespace

PeriodicFunction constant_function(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

PeriodicFunction cos_mode(int m, double amp) {
    const double w = 2 * pi * m;
    return {[=](double t) { return amp * std::cos(w * t); }, [=](double t) { return -amp * w * std::sin(w * t); },
            [=](double t) { return -amp * w * w * std::cos(w * t); }};
}

PeriodicFunction sin_mode(int m, double amp) {
    const double w = 2 * pi * m;
    return {[=](double t) { return amp * std::sin(w * t); }, [=](double t) { return amp * w * std::cos(w * t); },
            [=](double t) { return -amp * w * w * std::sin(w * t); }};
}

PeriodicFunction operator+(const PeriodicFunction& a, const PeriodicFunction& b) {
    return {[a, b](double t) { return a.f(t) + b.f(t); }, [a, b](double t) { return a.df(t) + b.df(t); },
            [a, b](double t) { return a.d2f(t) + b.d2f(t); }};
}

PeriodicFunction operator*(double s, const PeriodicFunction& a) {
    return {[s, a](double t) { return s * a.f(t); }, [s, a](double t) { return s * a.df(t); },
            [s, a](double t) { return s * a.d2f(t); }};
}

PeriodicFunction smooth_bump(double center, double width) {
    if (!(width > 0 && width <= 0.5)) throw ParameterError("smooth_bump: width must be in (0, 1/2]");
    auto coord = [=](double t) {
        double d = t - center;
        d -= std::round(d);
        return d / width;
    };
    auto eval = [=](double t, int order) {
        const double x = coord(t);
        if (std::abs(x) >= 1) return 0.0;
        const double s = 1 - x * x;
        const double b = std::exp(-1 / s);
        if (order == 0) return b;
        const double q1 = -2 * x / (s * s);
        if (order == 1) return b * q1 / width;
        const double q2 = -2 * (1 + 3 * x * x) / (s * s * s);
        return b * (q2 + q1 * q1) / (width * width);
    };
    return {[=](double t) { return eval(t, 0); }, [=](double t) { return eval(t, 1); },
            [=](double t) { return eval(t, 2); }};
}

double periodic_trapezoid(const std::function<double(double)>& f, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += f(double(i) / n);
    return s / n;
}

MetricProfile::MetricProfile(PeriodicFunction rho, bool constant) : rho_(std::move(rho)), constant_(constant) {
    for (int i = 0; i < quad_nodes; ++i) {
        const double r = rho_.f(double(i) / quad_nodes);
        if (!(r > 0) || !std::isfinite(r)) throw ParameterError("metric profile: rho must be positive");
    }
    // a constant is kept exactly rather than re-summed
    sigma2_ = constant ? rho_.f(0.0) : periodic_trapezoid(rho_.f, quad_nodes);
}

MetricProfile MetricProfile::from_rho(PeriodicFunction rho) {
    return MetricProfile(std::move(rho));
}

MetricProfile MetricProfile::from_inverse(PeriodicFunction w) {
    PeriodicFunction r{[w](double t) { return 1.0 / w.f(t); },
                       [w](double t) {
                           const double v = w.f(t);
                           return -w.df(t) / (v * v);
                       },
                       [w](double t) {
                           const double v = w.f(t), d = w.df(t);
                           return 2 * d * d / (v * v * v) - w.d2f(t) / (v * v);
                       }};
    for (int i = 0; i < quad_nodes; ++i)
        if (!(w.f(double(i) / quad_nodes) > 0)) throw ParameterError("metric profile: positivity violated, 1/rho <= 0");
    return MetricProfile(std::move(r));
}

MetricProfile MetricProfile::constant(double sigma2) {
    if (!(sigma2 > 0)) throw ParameterError("metric profile: sigma2 must be positive");
    return MetricProfile(constant_function(sigma2), true);
}

MetricProfile MetricProfile::rotated(double tau0) const {
    const PeriodicFunction r = rho_;
    return MetricProfile({[r, tau0](double t) { return r.f(t + tau0); }, [r, tau0](double t) { return r.df(t + tau0); },
                          [r, tau0](double t) { return r.d2f(t + tau0); }},
                         constant_);
}

MetricProfile MetricProfile::scaled(double lambda) const {
    if (!(lambda > 0)) throw ParameterError("metric profile: scale must be positive");
    return MetricProfile(lambda * rho_, constant_);
}

double reparam_h(const MetricProfile& rho, double t) {
    const double s = rho.sigma2_rho();
    const double whole = std::floor(t);
    const double r = t - whole;
    return whole + gk([&](double u) { return rho.rho(u); }, 0.0, r) / s;
}

NormaliserRoutes normaliser_routes(const MetricProfile& rho, double delta) {
    const double s = rho.sigma2_rho();
    const double grad = 0.5 * periodic_trapezoid(
                                  [&](double t) {
                                      const double r = rho.rho(t), d = rho.drho(t);
                                      return d * d / (r * r * r);
                                  },
                                  quad_nodes);

    double sch = 0, sec = 0;
    auto rf = [&](double u) { return rho.rho(u); };
    for (int i = 0; i < quad_nodes; ++i) {
        const double t = double(i) / quad_nodes;
        // h relative to h(t), from short integrals so no cancellation
        auto H = [&](double x) {
            if (x == t) return 0.0;
            return x > t ? gk_short(rf, t, x) / s : -gk_short(rf, x, t) / s;
        };
        const FdDerivs d = fd_derivatives(H, t, delta, t - 1.0, t + 1.0);
        const double r = d.d2 / d.d1;
        sch += (d.d3 / d.d1 - 1.5 * r * r) / rho.rho(t);
        sec += d.d2 * d.d2 / (d.d1 * d.d1 * d.d1);
    }
    sch /= quad_nodes;
    sec = 0.5 * sec / quad_nodes / s;
    return {grad, sch, sec};
}

double normaliser_C(const MetricProfile& rho) {
    const double g = 0.5 * periodic_trapezoid(
                               [&](double t) {
                                   const double r = rho.rho(t), d = rho.drho(t);
                                   return d * d / (r * r * r);
                               },
                               quad_nodes);
    if (g > 700) throw NumericError("normaliser_C: exponent exceeds 700");
    return std::exp(g);
}

double log_schwarzian_partition(double s) {
    if (!(s > 0)) throw ParameterError("log partition: sigma2 must be positive");
    return 1.5 * std::log(2 * pi) - 1.5 * std::log(s) + 2 * pi * pi / s;
}

double log_schwarzian_partition_derivative(int n, double s) {
    if (n == 0) return log_schwarzian_partition(s);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n
    return 1.5 * sign * factorial(n - 1) / std::pow(s, n) + 2 * pi * pi * sign * factorial(n) / std::pow(s, n + 1);
}

double log_partition_Z_metric(const MetricProfile& rho) {
    return std::log(normaliser_C(rho)) + log_schwarzian_partition(rho.sigma2_rho());
}

double partition_Z_metric(const MetricProfile& rho) {
    const double l = log_partition_Z_metric(rho);
    if (l > 700) throw NumericError("partition_Z_metric: overflow");
    // the product, so a constant metric gives schwarzian_partition bit for bit
    return normaliser_C(rho) * schwarzian_partition(rho.sigma2_rho());
}

double truncated_correlator(int k, double sigma2) {
    if (k < 1) throw ParameterError("truncated_correlator: k must be positive");
    if (!(sigma2 > 0)) throw ParameterError("truncated_correlator: sigma2 must be positive");
    return 2 * pi * pi * factorial(k) * std::pow(sigma2, k - 1) + 1.5 * factorial(k - 1) * std::pow(sigma2, k);
}

double correlator_formula(double sigma2, const std::vector<PeriodicFunction>& h) {
    const int k = static_cast<int>(h.size());
    if (k < 1 || k > 6) throw ParameterError("correlator_formula: need 1 <= k <= 6");
    if (!(sigma2 > 0)) throw ParameterError("correlator_formula: sigma2 must be positive");
    double total = 0;

    if (k >= 2) {
        double pair = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                pair += periodic_trapezoid(
                    [&](double t) {
                        double v = h[i].df(t) * h[j].df(t);
                        for (int l = 0; l < k; ++l)
                            if (l != i && l != j) v *= h[l].f(t);
                        return v;
                    },
                    quad_nodes);
        total += ((k % 2 == 0) ? 1.0 : -1.0) * factorial(k - 2) * std::pow(sigma2, k - 1) * pair;
    }

    std::vector<std::vector<std::vector<int>>> parts;
    std::vector<std::vector<int>> cur;
    partitions(k, 0, cur, parts);
    for (const auto& part : parts) {
        double term = log_schwarzian_partition_derivative(static_cast<int>(part.size()), sigma2);
        for (const auto& B : part) {
            const int b = static_cast<int>(B.size());
            const double I = periodic_trapezoid(
                [&](double t) {
                    double v = 1;
                    for (int l : B) v *= h[l].f(t);
                    return v;
                },
                quad_nodes);
            term *= ((b % 2 == 0) ? 1.0 : -1.0) * factorial(b) * std::pow(sigma2, b + 1) * I;
        }
        total += term;
    }
    return total;
}

double fd_mixed_derivative(double sigma2, const std::vector<PeriodicFunction>& h, double step) {
    const int k = static_cast<int>(h.size());
    if (k < 1 || k > 6) throw ParameterError("fd_mixed_derivative: need 1 <= k <= 6");
    if (!(step > 0)) throw ParameterError("fd_mixed_derivative: step must be positive");
    double acc = 0;
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<double> eps(k);
        double sign = 1;
        for (int i = 0; i < k; ++i) {
            const bool neg = (mask >> i) & 1;
            eps[i] = neg ? -step : step;
            if (neg) sign = -sign;
        }
        PeriodicFunction w = constant_function(1.0 / sigma2);
        for (int i = 0; i < k; ++i) w = w + eps[i] * h[i];
        acc += sign * log_partition_Z_metric(MetricProfile::from_inverse(w));
    }
    return acc / std::pow(2 * step, k);
}

FdCheck functional_derivative_check(int k, double sigma2, const std::vector<PeriodicFunction>& h, double step) {
    if (static_cast<int>(h.size()) != k) throw ParameterError("functional_derivative_check: need k test functions");
    const double num = fd_mixed_derivative(sigma2, h, step);
    const double form = correlator_formula(sigma2, h);
    const double scale = std::abs(form) < 1e-8 ? 1.0 : std::abs(form);
    return {num, form, std::abs(num - form) / scale};
}

double two_point_correlator_smeared(const PeriodicFunction& g1, const PeriodicFunction& g2, double sigma2) {
    if (!(sigma2 > 0)) throw ParameterError("two_point_correlator_smeared: sigma2 must be positive");
    const double s = sigma2;
    const double p4 = pi * pi * pi * pi, p2 = pi * pi;
    const double i1 = periodic_trapezoid(g1.f, quad_nodes);
    const double i2 = periodic_trapezoid(g2.f, quad_nodes);
    const double i12 = periodic_trapezoid([&](double t) { return g1.f(t) * g2.f(t); }, quad_nodes);
    const double i1dd2 = periodic_trapezoid([&](double t) { return g1.f(t) * g2.d2f(t); }, quad_nodes);
    return (4 * p4 + 10 * p2 * s + 3.75 * s * s) * i1 * i2 - 2 * s * (2 * p2 + 1.5 * s) * i12 - s * i1dd2;
}

}  // namespace sft
