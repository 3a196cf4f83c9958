#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sft/bridge.hpp"
#include "sft/mc_engine.hpp"

namespace sft {

struct OrbitalParams {
    double alpha2 = 0.0;
    double sigma2 = 1.0;

    OrbitalParams() = default;
    OrbitalParams(double alpha2_, double sigma2_);
};

// exp{(2 alpha2 / sigma2) int phi'^2}; NumericError if the exponent exceeds 700.
double weight_alpha(const CircleDiffeo& phi, const OrbitalParams& p);

// Z^alpha / Z^0 = (alpha / sin alpha) exp(2 alpha^2 / sigma^2).
double partition_ratio_exact(const OrbitalParams& p);

// 1 / sqrt(2 pi sigma2)
double z0(double sigma2);

struct MCOptions {
    int grid = 1 << 12;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::uint32_t chunks = 64;
    // elliptic runs with alpha2 > pi^2/4 need this
    bool allow_strong_elliptic = false;
    double unreliable_threshold = 0.05;

    RunConfig run(std::uint32_t lane = 0) const;
};

// E[weight_alpha(ms_map(xi, 0))] over the normalised bridge from 0 to 0.
MCEstimate mc_partition_ratio(const OrbitalParams& p, const MCOptions& o);

// The same functional on coupled grids N and 2N.
BiasProbe mc_partition_ratio_probe(const OrbitalParams& p, const MCOptions& o);

// Functionals G of a pinned diffeo.
using DiffeoFunctional = std::function<double(const CircleDiffeo&)>;

struct NamedFunctional {
    std::string name;
    DiffeoFunctional G;
};

// G = 1, G = phi'(0), G = exp(-int phi'^2)
std::vector<NamedFunctional> standard_defect_functionals();

struct DefectSides {
    std::string name;
    MCEstimate lhs, rhs;
};

// lhs = Z0 E[G(f_alpha o P) weight_alpha(P)],
// rhs = (alpha / sin alpha) Z0 E[G(P) exp(8 sin^2(alpha/2) phi'(0) / sigma2)],
// P the pinned MS map of a standard bridge; lhs and rhs use independent lanes.
std::vector<DefectSides> defect_identity_check(const OrbitalParams& p, const std::vector<NamedFunctional>& Gs,
                                               const MCOptions& o);

// (2 pi / sigma2)^{3/2} exp(2 pi^2 / sigma2)
double schwarzian_partition(double sigma2);

struct LimitRow {
    int k;
    double delta;  // pi - alpha
    double value;  // 4 pi delta / sigma2 * Z^alpha(sigma2)
    double rel_gap;
};

// alpha = pi - 10^{-k}, k = kmin..kmax
std::vector<LimitRow> schwarzian_limit_table(double sigma2, int kmin = 2, int kmax = 6);

struct SpectralCheck {
    double quadrature;       // E-integral form
    double quadrature_k;     // k-integral form
    double closed_form;
    double tail_bound;       // bound on the truncated tail
    double rel_gap;          // |quadrature - closed| / closed
    double form_gap;         // |quadrature - quadrature_k| / quadrature_k
};

// int_0^inf e^{-sigma2 E} 2 sinh(2 pi sqrt(2E)) dE against the closed form.
SpectralCheck spectral_density_check(double sigma2);

struct HaarOptions {
    int n_theta = 64;
    int n_v = 512;
    int table = 4096;       // samples of g(s) = phi'(phi^{-1}(s))
    double x_tol = 1e-7;    // requested relative tolerance per radial piece (the GK estimate is pessimistic)
    double tail_target = 1e-12;
    int max_depth = 3;      // GK bisection depth per radial piece; deeper only chases table kinks
};

struct HaarResult {
    double value;
    double bound;          // 2 pi / (pi + alpha)
    double tail_estimate;  // upper bound on the truncated radial tail, relative
    bool accuracy_warning; // tail_estimate > 1e-8
};

// D^alpha(phi) = 4 pi (pi - alpha) / sigma2 * int_PSL exp{-2 (pi^2 - alpha^2) / sigma2 * int (psi o phi)'^2} dnu_H
// Needs 0 <= alpha2 < pi^2.
HaarResult haar_regularizer_D(const CircleDiffeo& phi, const OrbitalParams& p, const HaarOptions& o = {});

// (2 pi / (pi + alpha)) exp(-2 (pi^2 - alpha^2) / sigma2)
double haar_regularizer_identity(const OrbitalParams& p);

}  // namespace sft
