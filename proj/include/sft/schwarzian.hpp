#pragma once

#include "sft/smooth_map.hpp"

namespace sft {

// f'''/f' - 3/2 (f''/f')^2 from a jet; throws NumericError if f' <= 0.
double schwarzian(const Jet3& j);

// Domain-checked: t must lie in [0,1].
double schwarzian(const SmoothMap& f, double t);

struct SidePair {
    double lhs, rhs;
};

// lhs = S(g o f, t) on the composed bundle, rhs = S(f,t) + S(g, f(t)) f'(t)^2.
SidePair schwarzian_chain_check(const SmoothMap& f, const SmoothMap& g, double t);

// lhs = S(tan(alpha phi - alpha/2), t), rhs = S(phi, t) + 2 alpha^2 phi'(t)^2.
SidePair tan_lift_check(const SmoothMap& phi, double alpha, double t);

}  // namespace sft
