#pragma once

#include <complex>

#include "sft/smooth_map.hpp"

namespace sft {

// Disk chart (z, a) of PSL(2,R) acting on the circle R/Z:
//   phi_{z,a}(t) = a - (i/2pi) log((e^{2 pi i t} - z) / (1 - conj(z) e^{2 pi i t})).
class MobiusElement {
public:
    MobiusElement() = default;
    MobiusElement(std::complex<double> z, double a);

    std::complex<double> z() const { return z_; }
    double a() const { return a_; }
    double rho() const { return std::abs(z_); }

    static MobiusElement identity() { return {}; }
    static MobiusElement rotation(double a) { return {0.0, a}; }

    MobiusElement inverse() const;

private:
    std::complex<double> z_{0.0, 0.0};
    double a_ = 0.0;
};

// m1 after m2, via SU(1,1) matrices.
MobiusElement operator*(const MobiusElement& m1, const MobiusElement& m2);

// Increasing lift R -> R with lift(t+1) = lift(t) + 1.
double mobius_lift(const MobiusElement& m, double t);

// Lift reduced mod 1.
double mobius_apply(const MobiusElement& m, double t);

// Poisson kernel (1 - |z|^2) / |e^{2 pi i t} - z|^2.
double mobius_derivative(const MobiusElement& m, double t);

Jet3 mobius_jet(const MobiusElement& m, double t);

// The lift as a SmoothMap (defined on all of R).
SmoothMap mobius_map(const MobiusElement& m);

// (1 + rho^2) / (1 - rho^2)
double mobius_energy(const MobiusElement& m);

// Periodic trapezoid of the squared derivative on n nodes.
double mobius_energy_quadrature(const MobiusElement& m, int n = 1 << 14);

}  // namespace sft
