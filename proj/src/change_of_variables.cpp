#include "sft/change_of_variables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sft/errors.hpp"
#include "sft/schwarzian.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;

double checked_exp(double x, const char* who) {
    if (x > 700) throw NumericError(std::string(who) + ": exponent exceeds 700");
    return std::exp(x);
}

void require_periodic(const SmoothMap& f, const char* who) {
    if (!f.periodic_derivatives(1e-10))
        throw ParameterError(std::string(who) + ": endpoint derivative data of f do not match (not periodic C^3)");
}

void require_reparam(const SmoothMap& f, const char* who) {
    if (!f.fixes_endpoints(1e-10)) throw ParameterError(std::string(who) + ": f must fix 0 and 1");
    const auto& e = f.endpoints();
    if (!(e.d1_0 > 0 && e.d1_1 > 0)) throw ParameterError(std::string(who) + ": f must be increasing");
}

// trapezoid of [S_f + c2 (f'^2 - 1)] phi'^2 over nodes with values x_i, derivatives d_i
template <class Nodes, class Arg>
double bulk(const SmoothMap& f, const Nodes& x, const Nodes& d, double c2, const Arg& farg,
            const std::function<double(int)>& inv_rho) {
    const int n = static_cast<int>(x.size()) - 1;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        const Jet3 j = f.jet(x[i]);
        const double fp = farg(i, j);
        double v = (schwarzian(j) + c2 * (fp * fp - 1.0)) * d[i] * d[i];
        if (inv_rho) v *= inv_rho(i);
        s += (i == 0 || i == n) ? 0.5 * v : v;
    }
    return s / n;
}
}  // namespace

double rn_unquotiented(const SmoothMap& f, const CircleDiffeo& phi, const OrbitalParams& p, FPrimeArgument arg) {
    require_periodic(f, "rn_unquotiented");
    const int n = phi.N();
    auto farg = [&](int i, const Jet3& j) { return arg == FPrimeArgument::phi ? j.d1 : f.d1(double(i) / n); };
    const double I = bulk(f, phi.lift(), phi.derivative(), 2 * p.alpha2, farg, {});
    return checked_exp(I / p.sigma2, "rn_unquotiented");
}

double rn_pinned(const SmoothMap& f, const CircleDiffeo& phi, double t0, const OrbitalParams& p) {
    require_reparam(f, "rn_pinned");
    const auto& e = f.endpoints();
    if (std::abs(e.d1_0 - e.d1_1) > 1e-10 * std::max(1.0, e.d1_0))
        throw ParameterError("rn_pinned: f'(0) != f'(1)");
    const int n = phi.N();
    const double kf = t0 * n;
    const long k = std::lround(kf);
    if (std::abs(kf - k) > 1e-9 || k < 0 || k > n) throw ParameterError("rn_pinned: t0 must be a grid node in [0,1]");
    const int k0 = static_cast<int>(k % n);
    const double base = phi.node(k0);
    if (std::abs(base - std::round(base)) > 1e-12) throw ParameterError("rn_pinned: pin mismatch, phi(t0) != 0 mod 1");

    // nodes re-indexed to start at t0, lift shifted to start at 0
    std::vector<double> x(n + 1), d(n + 1);
    const double r = std::round(base);
    for (int j = 0; j <= n; ++j) {
        const int i = k0 + j;
        x[j] = (i <= n ? phi.node(i) : phi.node(i - n) + 1.0) - r;
        d[j] = i <= n ? phi.dphi(i) : phi.dphi(i - n);
    }
    x[0] = 0.0;
    x[n] = 1.0;
    auto farg = [](int, const Jet3& j) { return j.d1; };
    const double I = bulk(f, x, d, 2 * p.alpha2, farg, {});
    const double defect = (e.d2_0 / e.d1_0 - e.d2_1 / e.d1_1) * d[0];
    return checked_exp((defect + I) / p.sigma2, "rn_pinned") / std::sqrt(e.d1_0 * e.d1_1);
}

BridgeDensity rn_bridge(const SmoothMap& f, const GridPath& xi, double sigma2) {
    require_reparam(f, "rn_bridge");
    if (!(sigma2 > 0)) throw ParameterError("rn_bridge: sigma2 must be positive");
    const auto& e = f.endpoints();
    const CircleDiffeo P = ms_map(xi, 0.0);
    const int n = P.N();
    auto farg = [](int, const Jet3& j) { return j.d1; };
    const double I = bulk(f, P.lift(), P.derivative(), 0.0, farg, {});
    const double boundary = e.d2_0 / e.d1_0 * P.dphi(0) - e.d2_1 / e.d1_1 * P.dphi(n);
    const double dens = checked_exp((boundary + I) / sigma2, "rn_bridge") / std::sqrt(e.d1_0 * e.d1_1);
    return {dens, f.endpoint_shift()};
}

double rn_metric(const SmoothMap& f, const CircleDiffeo& phi, const MetricProfile& rho) {
    require_periodic(f, "rn_metric");
    const int n = phi.N();
    std::vector<double> inv(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = rho.rho(double(i) / n);
        if (!(r > 0)) throw ParameterError("rn_metric: rho must be positive");
        inv[i] = 1.0 / r;
    }
    auto farg = [](int, const Jet3& j) { return j.d1; };
    const double I = bulk(f, phi.lift(), phi.derivative(), 2 * pi * pi, farg, [&](int i) { return inv[i]; });
    return checked_exp(I, "rn_metric");
}

double invert_bisection(const SmoothMap& f, double s, double tol) {
    double lo = 0.0, hi = 1.0;
    if (s <= f(0.0)) return 0.0;
    if (s >= f(1.0)) return 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

InverseTable::InverseTable(const SmoothMap& f, int M) : M_(M), x_(M + 1), dx_(M + 1) {
    if (M < 2) throw ParameterError("InverseTable: need M >= 2");
    require_reparam(f, "inverse");
    // strict monotonicity on a probe grid finer than the table
    double prev = f(0.0);
    const int probes = 4 * M;
    for (int i = 1; i <= probes; ++i) {
        const double v = f(double(i) / probes);
        if (!(v > prev)) throw NumericError("inversion failure: f is not strictly increasing on [0,1]");
        prev = v;
    }
    for (int j = 0; j <= M; ++j) {
        const double s = double(j) / M;
        x_[j] = j == 0 ? 0.0 : (j == M ? 1.0 : invert_bisection(f, s, 1e-15));
        const double d = f.d1(x_[j]);
        if (!(d > 0)) throw NumericError("inversion failure: f' is not positive");
        dx_[j] = 1.0 / d;
    }
}

double InverseTable::operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double h = 1.0 / M_;
    const double u = s * M_;
    const int j = std::min(static_cast<int>(u), M_ - 1);
    const double t = u - j;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * x_[j] + h10 * h * dx_[j] + h01 * x_[j + 1] + h11 * h * dx_[j + 1];
}

double InverseTable::max_residual(const SmoothMap& f, int probes) const {
    double worst = 0;
    for (int i = 0; i <= probes; ++i) {
        const double s = double(i) / probes;
        worst = std::max(worst, std::abs(f((*this)(s)) - s));
    }
    return worst;
}

std::vector<NamedPathFunctional> standard_path_functionals() {
    return {
        {"one", [](const GridPath&) { return 1.0; }},
        {"exp_mid", [](const GridPath& xi) {
             const double m = xi[xi.N() / 2];
             return std::exp(-m * m);
         }},
        {"exp_l2", [](const GridPath& xi) {
             const int n = xi.N();
             double s = 0.5 * (xi[0] * xi[0] + xi[n] * xi[n]);
             for (int i = 1; i < n; ++i) s += xi[i] * xi[i];
             return std::exp(-s / n);
         }},
    };
}

PushforwardReport verify_pushforward(const SmoothMap& f, const std::vector<NamedPathFunctional>& Fs, double sigma2,
                                     const MCOptions& o, bool common_random_numbers) {
    require_reparam(f, "verify_pushforward");
    if (!(sigma2 > 0)) throw ParameterError("verify_pushforward: sigma2 must be positive");
    if (o.grid < 2) throw ParameterError("verify_pushforward: grid must be at least 2");
    if (Fs.empty()) throw ParameterError("verify_pushforward: no functionals");
    const int N = o.grid;
    const std::size_t m = Fs.size();
    const double b = f.endpoint_shift();
    const InverseTable finv(f);
    const double logd0 = std::log(f.endpoints().d1_0);
    const double mass_a = bridge_mass(sigma2, 0.0, 1.0);
    const double mass_b = bridge_mass(sigma2, -b, 1.0);

    const auto A = estimate_many(o.run(1), m, [&](Stream& s, std::span<double> out) {
        std::vector<double> xi(N + 1);
        sample_bridge_into(s, sigma2, 0.0, 1.0, xi);
        const CircleDiffeo P = ms_map(GridPath(xi, 1.0), 0.0);
        std::vector<double> y(N + 1);
        y[0] = 0.0;
        for (int i = 1; i <= N; ++i) y[i] = xi[i] - std::log(f.d1(finv(P.node(i)))) + logd0;
        const GridPath eta(std::move(y), 1.0);
        for (std::size_t k = 0; k < m; ++k) out[k] = mass_a * Fs[k].F(eta);
    });
    const auto B = estimate_many(o.run(common_random_numbers ? 1 : 2), m, [&](Stream& s, std::span<double> out) {
        const GridPath xi = sample_bridge(sigma2, -b, 1.0, N, s);
        const double d = rn_bridge(f, xi, sigma2).density;
        for (std::size_t k = 0; k < m; ++k) out[k] = mass_b * Fs[k].F(xi) * d;
    });
    PushforwardReport rep{b, {}};
    for (std::size_t k = 0; k < m; ++k) rep.sides.push_back({Fs[k].name, A[k], B[k]});
    return rep;
}

}  // namespace sft
