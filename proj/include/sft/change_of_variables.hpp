#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sft/bridge.hpp"
#include "sft/metric.hpp"
#include "sft/orbital.hpp"
#include "sft/smooth_map.hpp"

namespace sft {

// Where f' is evaluated in the 2 alpha^2 (f'^2 - 1) term: at phi(tau)
// (chain-rule consistent, the default) or at tau itself.
enum class FPrimeArgument { phi, tau };

// exp{(1/sigma2) int [S_f(phi) + 2 alpha2 (f'(phi)^2 - 1)] phi'^2}, trapezoid on
// phi's nodes. f must have periodic derivatives.
double rn_unquotiented(const SmoothMap& f, const CircleDiffeo& phi, const OrbitalParams& p,
                       FPrimeArgument arg = FPrimeArgument::phi);

// Density of the measure pinned at t0 (a node of phi's grid with phi(t0) = 0 mod 1):
//   1/sqrt(f'(0) f'(1)) exp{(1/sigma2)[f''(0)/f'(0) - f''(1)/f'(1)] phi'(t0)
//                           + (1/sigma2) int [S_f(phi) + 2 alpha2 (f'(phi)^2 - 1)] phi'^2}
double rn_pinned(const SmoothMap& f, const CircleDiffeo& phi, double t0, const OrbitalParams& p);

struct BridgeDensity {
    double density;
    double b;  // log f'(1) - log f'(0)
};

// Density of the pushforward of the bridge under xi -> P^{-1}(f^{-1} o P_xi)
// against the bridge ending at a - b.
BridgeDensity rn_bridge(const SmoothMap& f, const GridPath& xi, double sigma2);

// exp{int [S_f(phi) + 2 pi^2 (f'(phi)^2 - 1)] phi'^2 / rho}
double rn_metric(const SmoothMap& f, const CircleDiffeo& phi, const MetricProfile& rho);

// f^{-1} on [0,1]: nodes by bisection, cubic Hermite in between.
class InverseTable {
public:
    explicit InverseTable(const SmoothMap& f, int M = 8192);
    double operator()(double s) const;
    // max |f(f^{-1}(s)) - s| over a probe grid
    double max_residual(const SmoothMap& f, int probes = 10007) const;

private:
    int M_;
    std::vector<double> x_, dx_;
};

// Bisection root of f(x) = s on [0,1] to |interval| <= tol.
double invert_bisection(const SmoothMap& f, double s, double tol = 1e-12);

using PathFunctional = std::function<double(const GridPath&)>;

struct NamedPathFunctional {
    std::string name;
    PathFunctional F;
};

// F = 1, F = exp(-xi(1/2)^2), F = exp(-int xi^2)
std::vector<NamedPathFunctional> standard_path_functionals();

struct PushforwardSides {
    std::string name;
    MCEstimate side_a, side_b;
};

struct PushforwardReport {
    double b;
    std::vector<PushforwardSides> sides;
};

// side_a = mass(0) E_{a=0}[F(P^{-1}(f^{-1} o P_xi))],
// side_b = mass(-b) E_{a=-b}[F(xi) density(xi)].
// Independent lanes unless common_random_numbers is set.
PushforwardReport verify_pushforward(const SmoothMap& f, const std::vector<NamedPathFunctional>& Fs, double sigma2,
                                     const MCOptions& o, bool common_random_numbers = false);

}  // namespace sft
