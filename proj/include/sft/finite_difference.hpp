#pragma once

#include <functional>
#include <vector>

namespace sft {

// Fornberg weights for derivatives 0..m at x0 from the nodes x.
// Result[k][j] is the weight of f(x[j]) in the k-th derivative.
std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x, int m);

struct FdDerivs {
    double d1, d2, d3;
};

// 9-point stencil with spacing delta, shifted so every node stays in [lo, hi].
FdDerivs fd_derivatives(const std::function<double(double)>& f, double t, double delta, double lo, double hi);

double fd_schwarzian(const std::function<double(double)>& f, double t, double delta, double lo, double hi);

}  // namespace sft
