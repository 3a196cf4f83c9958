#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sft/smooth_map.hpp"

namespace sft {

// alpha / sin(alpha) as a function of alpha^2, continued to beta / sinh(beta)
// for alpha^2 = -beta^2 < 0. Requires alpha2 < pi^2.
double alpha_over_sin(double alpha2);

// 8 sin^2(alpha/2), continued to -8 sinh^2(beta/2).
double eight_sin2_half(double alpha2);

// 2 alpha tan(alpha/2), continued to -2 beta tanh(beta/2).
double two_alpha_tan_half(double alpha2);

// f_alpha(t) = 1/2 (tan(alpha(t - 1/2)) / tan(alpha/2) + 1), Schwarzian 2 alpha^2.
SmoothMap f_alpha(double alpha2);

// Solution of S(f, t) = q(t), q <= 0, built from two Hill solutions
//   g'' = -q g / 2,  g1(0) = 1, g1'(0) = 0,  g2(0) = 0, g2'(0) = 1
// with f = a g2 / h1, h1 = c g2 + g1 periodic at the endpoints. The ODE is
// continued 0.05 past each end, so q must be defined there too.
struct HillSolution {
    SmoothMap map;
    double step;
    double a;   // f'(0) = f'(1) = a
    double c;
};

HillSolution hill_construct(const std::function<double(double)>& q, double step = 1e-4);

// max |S_fd(f, t) - q(t)| over `points` equally spaced t in [0,1], where S_fd
// is a 9-point finite-difference Schwarzian of f's values with spacing delta.
double hill_residual(const HillSolution& sol, const std::function<double(double)>& q, double delta = 5e-3,
                     int points = 201);

}  // namespace sft
