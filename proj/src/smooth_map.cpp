#include "sft/smooth_map.hpp"

#include <cmath>
#include <numbers>

#include "sft/errors.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}
}  // namespace

SmoothMap::SmoothMap(Eval eval, std::string name) : eval_(std::move(eval)), name_(std::move(name)) {
    const Jet3 a = eval_(0.0);
    const Jet3 b = eval_(1.0);
    ends_ = {a.f, b.f, a.d1, b.d1, a.d2, b.d2, a.d3, b.d3};
}

bool SmoothMap::periodic_derivatives(double tol) const {
    return close(ends_.d1_0, ends_.d1_1, tol) && close(ends_.d2_0, ends_.d2_1, tol) &&
           close(ends_.d3_0, ends_.d3_1, tol);
}

bool SmoothMap::fixes_endpoints(double tol) const {
    return std::abs(ends_.f0) <= tol && std::abs(ends_.f1 - 1.0) <= tol;
}

double SmoothMap::endpoint_shift() const {
    return std::log(ends_.d1_1) - std::log(ends_.d1_0);
}

SmoothMap identity_map() {
    return SmoothMap([](double t) { return Jet3{t, 1.0, 0.0, 0.0}; }, "identity");
}

SmoothMap fractional_linear(double k) {
    if (!(k > 0)) throw ParameterError("fractional_linear: k must be positive");
    return SmoothMap(
        [k](double t) {
            const double D = k + (1.0 - k) * t;
            const double c = 1.0 - k;
            return Jet3{t / D, k / (D * D), -2.0 * k * c / (D * D * D), 6.0 * k * c * c / (D * D * D * D)};
        },
        "fractional_linear");
}

SmoothMap sine_perturbation(double eps, int m) {
    if (!(std::abs(eps) < 1.0) || m < 1) throw ParameterError("sine_perturbation: need |eps| < 1, m >= 1");
    const double w = 2.0 * pi * m;
    return SmoothMap(
        [eps, w](double t) {
            const double s = std::sin(w * t), c = std::cos(w * t);
            return Jet3{t + eps * s / w, 1.0 + eps * c, -eps * w * s, -eps * w * w * c};
        },
        "sine_perturbation");
}

SmoothMap exp_map(double lambda) {
    if (lambda == 0.0) return identity_map();
    const double n = std::expm1(lambda);
    return SmoothMap(
        [lambda, n](double t) {
            const double e = std::exp(lambda * t);
            return Jet3{std::expm1(lambda * t) / n, lambda * e / n, lambda * lambda * e / n,
                        lambda * lambda * lambda * e / n};
        },
        "exp_map");
}

SmoothMap sine_squared_bump(double c) {
    if (!(std::abs(c) * pi < 1.0)) throw ParameterError("sine_squared_bump: need |c| < 1/pi");
    return SmoothMap(
        [c](double t) {
            const double s = std::sin(pi * t);
            const double s2 = std::sin(2 * pi * t), c2 = std::cos(2 * pi * t);
            return Jet3{t + c * s * s, 1.0 + c * pi * s2, 2.0 * c * pi * pi * c2, -4.0 * c * pi * pi * pi * s2};
        },
        "sine_squared_bump");
}

SmoothMap exponential() {
    return SmoothMap(
        [](double t) {
            const double e = std::exp(t);
            return Jet3{e, e, e, e};
        },
        "exp");
}

SmoothMap tangent_lift(double alpha) {
    return SmoothMap(
        [alpha](double t) {
            const double u = std::tan(alpha * t - alpha / 2);
            const double d1 = alpha * (1 + u * u);
            const double d2 = 2 * alpha * u * d1;
            const double d3 = 2 * alpha * (d1 * d1 + u * d2);
            return Jet3{u, d1, d2, d3};
        },
        "tan_lift");
}

Jet3 compose_jets(const Jet3& g, const Jet3& f) {
    return Jet3{g.f, g.d1 * f.d1, g.d2 * f.d1 * f.d1 + g.d1 * f.d2,
                g.d3 * f.d1 * f.d1 * f.d1 + 3.0 * g.d2 * f.d1 * f.d2 + g.d1 * f.d3};
}

SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
    return SmoothMap(
        [g, f](double t) {
            const Jet3 jf = f.jet(t);
            return compose_jets(g.jet(jf.f), jf);
        },
        g.name() + "_o_" + f.name());
}

}  // namespace sft
