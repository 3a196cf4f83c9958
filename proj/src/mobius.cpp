#include "sft/mobius.hpp"

#include <cmath>
#include <numbers>

#include "sft/errors.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

double reduce(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}
}  // namespace

MobiusElement::MobiusElement(cplx z, double a) : z_(z), a_(reduce(a)) {
    if (!(std::abs(z) < 1.0)) throw ParameterError("MobiusElement: need |z| < 1");
    if (!std::isfinite(a)) throw ParameterError("MobiusElement: a must be finite");
}

MobiusElement MobiusElement::inverse() const {
    return {-z_ * std::polar(1.0, 2 * pi * a_), -a_};
}

MobiusElement operator*(const MobiusElement& m1, const MobiusElement& m2) {
    // [[e^{i pi a}, -z e^{i pi a}], [-conj(z) e^{-i pi a}, e^{-i pi a}]]
    auto mat = [](const MobiusElement& m, cplx& A, cplx& B, cplx& C, cplx& D) {
        const cplx e = std::polar(1.0, pi * m.a());
        A = e;
        B = -m.z() * e;
        C = -std::conj(m.z()) / e;
        D = 1.0 / e;
    };
    cplx A1, B1, C1, D1, A2, B2, C2, D2;
    mat(m1, A1, B1, C1, D1);
    mat(m2, A2, B2, C2, D2);
    const cplx A = A1 * A2 + B1 * C2;
    const cplx B = A1 * B2 + B1 * D2;
    return {-B / A, std::arg(A) / pi};
}

double mobius_lift(const MobiusElement& m, double t) {
    // Re(1 - z e^{-2 pi i t}) > 0, so arg is continuous in t
    const cplx w = 1.0 - m.z() * std::polar(1.0, -2 * pi * t);
    return m.a() + t + std::arg(w) / pi;
}

double mobius_apply(const MobiusElement& m, double t) {
    return reduce(mobius_lift(m, t));
}

double mobius_derivative(const MobiusElement& m, double t) {
    return mobius_jet(m, t).d1;
}

Jet3 mobius_jet(const MobiusElement& m, double t) {
    const double rho = std::abs(m.z());
    const double theta = std::arg(m.z()) / (2 * pi);
    const double psi = 2 * pi * (t - theta);
    const double one_m = 1 - rho * rho;
    const double D = 1 + rho * rho - 2 * rho * std::cos(psi);
    const double D1 = 4 * pi * rho * std::sin(psi);
    const double D2 = 8 * pi * pi * rho * std::cos(psi);
    const double p = one_m / D;
    const double p1 = -one_m * D1 / (D * D);
    const double p2 = one_m * (2 * D1 * D1 / (D * D * D) - D2 / (D * D));
    return {mobius_lift(m, t), p, p1, p2};
}

SmoothMap mobius_map(const MobiusElement& m) {
    return SmoothMap([m](double t) { return mobius_jet(m, t); }, "mobius");
}

double mobius_energy(const MobiusElement& m) {
    const double r2 = std::norm(m.z());
    return (1 + r2) / (1 - r2);
}

double mobius_energy_quadrature(const MobiusElement& m, int n) {
    if (n < 1) throw ParameterError("mobius_energy_quadrature: n must be positive");
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = mobius_derivative(m, double(i) / n);
        s += d * d;
    }
    return s / n;
}

}  // namespace sft
