#include "sft/special_maps.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <cmath>
#include <numbers>

#include "sft/errors.hpp"
#include "sft/finite_difference.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;

void check_alpha2(double alpha2, const char* who) {
    if (!std::isfinite(alpha2)) throw ParameterError(std::string(who) + ": alpha2 must be finite");
    if (alpha2 >= pi * pi)
        throw ParameterError(std::string(who) + ": alpha2 >= pi^2 (pole of alpha/sin(alpha))");
}
}  // namespace

double alpha_over_sin(double x) {
    check_alpha2(x, "alpha_over_sin");
    if (std::abs(x) < 1e-3) return 1.0 + x / 6.0 + 7.0 * x * x / 360.0 + 31.0 * x * x * x / 15120.0;
    if (x > 0) {
        const double a = std::sqrt(x);
        return a / std::sin(a);
    }
    const double b = std::sqrt(-x);
    return b / std::sinh(b);
}

double eight_sin2_half(double x) {
    if (x >= 0) {
        const double s = std::sin(std::sqrt(x) / 2);
        return 8 * s * s;
    }
    const double s = std::sinh(std::sqrt(-x) / 2);
    return -8 * s * s;
}

double two_alpha_tan_half(double x) {
    if (x >= 0) {
        const double a = std::sqrt(x);
        return 2 * a * std::tan(a / 2);
    }
    const double b = std::sqrt(-x);
    return -2 * b * std::tanh(b / 2);
}

SmoothMap f_alpha(double alpha2) {
    check_alpha2(alpha2, "f_alpha");
    if (alpha2 == 0.0) return identity_map();
    // U(s) = tan(alpha s)/alpha (tanh for alpha2 < 0); U' = 1 + alpha2 U^2
    auto U = [alpha2](double s) {
        if (alpha2 > 0) {
            const double a = std::sqrt(alpha2);
            return std::tan(a * s) / a;
        }
        const double b = std::sqrt(-alpha2);
        return std::tanh(b * s) / b;
    };
    const double u_half = U(0.5);
    return SmoothMap(
        [alpha2, U, u_half](double t) {
            const double u = U(t - 0.5);
            const double u1 = 1 + alpha2 * u * u;
            const double u2 = 2 * alpha2 * u * u1;
            const double u3 = 2 * alpha2 * (u1 * u1 + u * u2);
            const double k = 0.5 / u_half;
            return Jet3{0.5 + k * u, k * u1, k * u2, k * u3};
        },
        "f_alpha");
}

namespace {

struct State {
    double g, dg;
};

// one classical RK4 step of g'' = -q g / 2 from t over h
template <class Q>
State rk4(const Q& q, double t, double h, State y) {
    auto rhs = [&](double s, State v) { return State{v.dg, -0.5 * q(s) * v.g}; };
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + h / 2, {y.g + h / 2 * k1.g, y.dg + h / 2 * k1.dg});
    const State k3 = rhs(t + h / 2, {y.g + h / 2 * k2.g, y.dg + h / 2 * k2.dg});
    const State k4 = rhs(t + h, {y.g + h * k3.g, y.dg + h * k3.dg});
    return {y.g + h / 6 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g), y.dg + h / 6 * (k1.dg + 2 * k2.dg + 2 * k3.dg + k4.dg)};
}

struct HillTables {
    std::function<double(double)> q;
    int n, m;  // m nodes of margin on each side of [0,1]
    double h;
    double a, c;
    std::vector<State> h1, g2;  // index j holds node j - m
};

}  // namespace

HillSolution hill_construct(const std::function<double(double)>& q, double step) {
    if (!(step > 0 && step <= 0.1)) throw ParameterError("hill_construct: step must be in (0, 0.1]");
    const int n = static_cast<int>(std::lround(1.0 / step));
    const double h = 1.0 / n;

    for (int i = 0; i < n; ++i) {
        for (double s : {i * h, (i + 0.5) * h, (i + 1) * h}) {
            const double v = q(s);
            if (!std::isfinite(v)) throw ParameterError("hill_construct: q is not finite at t=" + std::to_string(s));
            if (v > 0) throw ParameterError("hill_construct: q > 0 at t=" + std::to_string(s));
        }
    }

    // The solutions are continued a short way past both ends so that
    // derivatives near 0 and 1 can be probed with centred stencils.
    const int m = static_cast<int>(std::ceil(0.05 / h));
    const int total = n + 2 * m + 1;
    std::vector<State> g1(total), g2(total);
    g1[m] = {1.0, 0.0};
    g2[m] = {0.0, 1.0};
    for (int j = m; j + 1 < total; ++j) {
        g1[j + 1] = rk4(q, (j - m) * h, h, g1[j]);
        g2[j + 1] = rk4(q, (j - m) * h, h, g2[j]);
    }
    for (int j = m; j > 0; --j) {
        g1[j - 1] = rk4(q, (j - m) * h, -h, g1[j]);
        g2[j - 1] = rk4(q, (j - m) * h, -h, g2[j]);
    }
    if (!(g2[n + m].g > 0)) throw NumericError("hill_construct: g2(1) is not positive");
    const double c = (1.0 - g1[n + m].g) / g2[n + m].g;
    const double a = 1.0 / g2[n + m].g;

    auto tab = std::make_shared<HillTables>();
    tab->q = q;
    tab->n = n;
    tab->m = m;
    tab->h = h;
    tab->a = a;
    tab->c = c;
    tab->h1.resize(total);
    tab->g2 = g2;
    for (int j = 0; j < total; ++j) {
        tab->h1[j] = {c * g2[j].g + g1[j].g, c * g2[j].dg + g1[j].dg};
        if (j >= m && j <= n + m && !(tab->h1[j].g > 0)) throw NumericError("hill_construct: h1 is not positive");
    }
    tab->h1[n + m].g = 1.0;  // periodic by construction

    auto eval = [tab](double t) {
        int j = static_cast<int>(std::floor(t / tab->h)) + tab->m;
        j = std::clamp(j, 0, static_cast<int>(tab->h1.size()) - 2);
        const double t0 = (j - tab->m) * tab->h;
        const double dt = t - t0;
        State H = tab->h1[j], G = tab->g2[j];
        if (dt != 0.0) {
            H = rk4(tab->q, t0, dt, H);
            G = rk4(tab->q, t0, dt, G);
        }
        const double a = tab->a;
        const double x = H.g, dx = H.dg;
        const double ddx = -0.5 * tab->q(t) * x;
        const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
        return Jet3{a * G.g / x, a / x2, -2 * a * dx / x3, -2 * a * ddx / x3 + 6 * a * dx * dx / x4};
    };
    return HillSolution{SmoothMap(eval, "hill"), h, a, c};
}

double hill_residual(const HillSolution& sol, const std::function<double(double)>& q, double delta, int points) {
    if (points < 2) throw ParameterError("hill_residual: need at least 2 points");
    // stencil nodes on multiples of the integration step hit stored nodes exactly;
    // near the ends the stencil reaches into the continued solution
    if (4 * delta > 0.05) throw ParameterError("hill_residual: delta must be at most 0.0125");
    delta = std::max(1.0, std::round(delta / sol.step)) * sol.step;
    const auto f = [&](double t) { return sol.map(t); };
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / (points - 1);
        const double s = fd_schwarzian(f, t, delta, -1.0, 2.0);
        worst = std::max(worst, std::abs(s - q(t)));
    }
    return worst;
}

}  // namespace sft
