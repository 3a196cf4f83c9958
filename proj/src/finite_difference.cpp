#include "sft/finite_difference.hpp"

#include <algorithm>
#include <cmath>

#include "sft/errors.hpp"

namespace sft {

std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

FdDerivs fd_derivatives(const std::function<double(double)>& f, double t, double delta, double lo, double hi) {
    constexpr int half = 4;
    if (hi - lo < 2 * half * delta) throw ParameterError("fd_derivatives: interval too short for stencil");
    // shift the stencil start so all nodes are inside [lo, hi]
    double start = t - half * delta;
    if (start < lo) start = lo;
    if (start + 2 * half * delta > hi) start = hi - 2 * half * delta;
    std::vector<double> xs(2 * half + 1), fs(2 * half + 1);
    for (int j = 0; j <= 2 * half; ++j) {
        xs[j] = start + j * delta;
        fs[j] = f(xs[j]);
    }
    const auto w = fornberg_weights(t, xs, 3);
    FdDerivs d{0, 0, 0};
    for (int j = 0; j <= 2 * half; ++j) {
        d.d1 += w[1][j] * fs[j];
        d.d2 += w[2][j] * fs[j];
        d.d3 += w[3][j] * fs[j];
    }
    return d;
}

double fd_schwarzian(const std::function<double(double)>& f, double t, double delta, double lo, double hi) {
    const FdDerivs d = fd_derivatives(f, t, delta, lo, hi);
    const double r = d.d2 / d.d1;
    return d.d3 / d.d1 - 1.5 * r * r;
}

}  // namespace sft
