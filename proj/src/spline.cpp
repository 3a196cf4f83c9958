#include "sft/spline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "sft/errors.hpp"

namespace sft {

namespace {
struct SplineData {
    std::vector<double> t, f, m;  // m = second derivatives at knots
};
}  // namespace

SmoothMap cubic_spline_map(const std::vector<double>& t, const std::vector<double>& f) {
    const std::size_t n = t.size();
    if (n < 3 || f.size() != n) throw ParameterError("spline: need at least 3 knots with matching values");
    if (t.front() != 0.0 || t.back() != 1.0) throw ParameterError("spline: knots must span [0,1]");
    if (f.front() != 0.0 || f.back() != 1.0) throw ParameterError("spline: values must run from 0 to 1");
    for (std::size_t i = 1; i < n; ++i)
        if (!(t[i] > t[i - 1])) throw ParameterError("spline: knots must be strictly increasing");

    // tridiagonal system for the natural spline
    auto d = std::make_shared<SplineData>();
    d->t = t;
    d->f = f;
    d->m.assign(n, 0.0);
    std::vector<double> a(n, 0), b(n, 1), c(n, 0), r(n, 0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        a[i] = h0 / 6;
        b[i] = (h0 + h1) / 3;
        c[i] = h1 / 6;
        r[i] = (f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    d->m[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d->m[i] = (r[i] - c[i] * d->m[i + 1]) / b[i];

    auto eval = [d](double x) {
        const auto& T = d->t;
        const std::size_t k = T.size();
        std::size_t i = static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), x) - T.begin());
        i = std::clamp<std::size_t>(i, 1, k - 1) - 1;
        const double h = T[i + 1] - T[i];
        const double A = (T[i + 1] - x) / h, B = (x - T[i]) / h;
        const double m0 = d->m[i], m1 = d->m[i + 1];
        const double f0 = d->f[i], f1 = d->f[i + 1];
        const double v = A * f0 + B * f1 + ((A * A * A - A) * m0 + (B * B * B - B) * m1) * h * h / 6;
        const double d1 = (f1 - f0) / h - (3 * A * A - 1) / 6 * h * m0 + (3 * B * B - 1) / 6 * h * m1;
        const double d2 = A * m0 + B * m1;
        const double d3 = (m1 - m0) / h;
        return Jet3{v, d1, d2, d3};
    };
    SmoothMap map(eval, "spline");
    for (int i = 0; i <= 4096; ++i)
        if (!(map.d1(i / 4096.0) > 0)) throw ParameterError("spline: not strictly increasing on [0,1]");
    return map;
}

SmoothMap load_spline_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("spline: cannot open " + path);
    std::vector<double> t, f;
    std::string line;
    while (std::getline(in, line)) {
        const auto p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '#') continue;
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b)) throw ParameterError("spline: malformed row '" + line + "'");
        t.push_back(a);
        f.push_back(b);
    }
    return cubic_spline_map(t, f);
}

}  // namespace sft
