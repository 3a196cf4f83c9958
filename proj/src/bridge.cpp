#include "sft/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sft/errors.hpp"

namespace sft {

namespace {
constexpr double pi = std::numbers::pi;
}

GridPath::GridPath(std::vector<double> values, double T) : v_(std::move(values)), T_(T) {
    if (v_.size() < 3) throw ParameterError("GridPath: need N >= 2");
    if (!(T > 0)) throw ParameterError("GridPath: T must be positive");
    if (v_.front() != 0.0) throw ParameterError("GridPath: path must start at 0");
}

void CircleDiffeo::finish_nodes() {
    const int n = N();
    if (n < 2) throw ParameterError("CircleDiffeo: need N >= 2");
    for (int i = 0; i <= n; ++i) {
        if (!(dphi_[i] > 0)) throw NumericError("CircleDiffeo: derivative is not positive");
        if (i > 0 && !(lift_[i] >= lift_[i - 1])) throw NumericError("CircleDiffeo: lift is not increasing");
    }
    double s = 0.5 * (dphi_[0] * dphi_[0] + dphi_[n] * dphi_[n]);
    for (int i = 1; i < n; ++i) s += dphi_[i] * dphi_[i];
    energy_ = s / n;
    I_ = 1.0 / dphi_[0];
    J_ = energy_ * I_ * I_;
}

CircleDiffeo CircleDiffeo::from_path(const GridPath& xi, double theta) {
    if (std::abs(xi.T() - 1.0) > 1e-15) throw ParameterError("ms_map: path horizon must be 1");
    const int n = xi.N();
    const double h = 1.0 / n;
    CircleDiffeo d;
    d.lift_.resize(n + 1);
    d.dphi_.resize(n + 1);
    std::vector<double> e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = std::exp(xi[i]);
    double c = 0.0, j = 0.5 * (e[0] * e[0] + e[n] * e[n]);
    d.lift_[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        c += 0.5 * h * (e[i - 1] + e[i]);
        d.lift_[i] = c;
        if (i < n) j += e[i] * e[i];
    }
    const double I = c;
    const double J = j * h;
    for (int i = 0; i <= n; ++i) {
        d.lift_[i] = theta + d.lift_[i] / I;
        d.dphi_[i] = e[i] / I;
    }
    d.lift_[n] = theta + 1.0;
    d.I_ = I;
    d.J_ = J;
    d.energy_ = J / (I * I);
    return d;
}

CircleDiffeo CircleDiffeo::from_nodes(std::vector<double> lift, std::vector<double> dphi) {
    if (lift.size() != dphi.size()) throw ParameterError("CircleDiffeo: size mismatch");
    if (lift.size() < 3) throw ParameterError("CircleDiffeo: need N >= 2");
    if (std::abs(lift.back() - lift.front() - 1.0) > 1e-9)
        throw ParameterError("CircleDiffeo: lift must advance by exactly 1 over the circle");
    CircleDiffeo d;
    d.lift_ = std::move(lift);
    d.dphi_ = std::move(dphi);
    d.lift_.back() = d.lift_.front() + 1.0;
    d.finish_nodes();
    return d;
}

CircleDiffeo CircleDiffeo::from_map(const SmoothMap& f, int N) {
    if (N < 2) throw ParameterError("CircleDiffeo: need N >= 2");
    std::vector<double> l(N + 1), d(N + 1);
    for (int i = 0; i <= N; ++i) {
        const Jet3 j = f.jet(double(i) / N);
        l[i] = j.f;
        d[i] = j.d1;
    }
    return from_nodes(std::move(l), std::move(d));
}

CircleDiffeo CircleDiffeo::identity(int N) {
    return from_map(identity_map(), N);
}

double CircleDiffeo::value(double t) const {
    const int n = N();
    const double fl = std::floor(t);
    const double x = (t - fl) * n;
    const int i = std::clamp(static_cast<int>(x), 0, n - 1);
    const double w = x - i;
    return fl + lift_[i] + w * (lift_[i + 1] - lift_[i]);
}

double CircleDiffeo::deriv(double t) const {
    const int n = N();
    const double x = (t - std::floor(t)) * n;
    const int i = std::clamp(static_cast<int>(x), 0, n - 1);
    const double w = x - i;
    return dphi_[i] + w * (dphi_[i + 1] - dphi_[i]);
}

double CircleDiffeo::inverse(double s) const {
    const int n = N();
    const double th = lift_.front();
    const double target = s - std::floor(s - th);
    auto it = std::upper_bound(lift_.begin(), lift_.end(), target);
    int i = static_cast<int>(it - lift_.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    const double span = lift_[i + 1] - lift_[i];
    const double w = span > 0 ? (target - lift_[i]) / span : 0.0;
    double t = (i + std::clamp(w, 0.0, 1.0)) / n;
    return t >= 1.0 ? t - 1.0 : t;
}

CircleDiffeo CircleDiffeo::post_compose(const SmoothMap& f) const {
    const int n = N();
    std::vector<double> l(n + 1), d(n + 1);
    for (int i = 0; i <= n; ++i) {
        const Jet3 j = f.jet(lift_[i]);
        l[i] = j.f;
        d[i] = j.d1 * dphi_[i];
    }
    return from_nodes(std::move(l), std::move(d));
}

CircleDiffeo CircleDiffeo::rotated(int k) const {
    const int n = N();
    k = ((k % n) + n) % n;
    std::vector<double> l(n + 1), d(n + 1);
    for (int i = 0; i < n; ++i) {
        const int j = i + k;
        l[i] = j < n ? lift_[j] : lift_[j - n] + 1.0;
        d[i] = j < n ? dphi_[j] : dphi_[j - n];
    }
    l[n] = l[0] + 1.0;
    d[n] = d[0];
    return from_nodes(std::move(l), std::move(d));
}

CircleDiffeo CircleDiffeo::shifted(double dd) const {
    CircleDiffeo c = *this;
    for (double& x : c.lift_) x += dd;
    return c;
}

void sample_bridge_into(Stream& s, double sigma2, double a, double T, std::span<double> out) {
    if (!(sigma2 > 0)) throw ParameterError("sample_bridge: sigma2 must be positive");
    if (!(T > 0)) throw ParameterError("sample_bridge: T must be positive");
    if (out.size() < 3) throw ParameterError("sample_bridge: need N >= 2");
    const std::size_t n = out.size() - 1;
    const double sd = std::sqrt(sigma2 * T / double(n));
    out[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) out[i] = out[i - 1] + sd * s.normal();
    const double gap = out[n] - a;
    for (std::size_t i = 1; i < n; ++i) out[i] -= (double(i) / double(n)) * gap;
    out[n] = a;
}

GridPath sample_bridge(double sigma2, double a, double T, int N, Stream& s) {
    if (N < 2) throw ParameterError("sample_bridge: need N >= 2");
    std::vector<double> v(N + 1);
    sample_bridge_into(s, sigma2, a, T, v);
    return GridPath(std::move(v), T);
}

void refine_midpoint(std::span<const double> coarse, double sigma2, double T, Stream& s, std::span<double> fine) {
    const std::size_t n = coarse.size() - 1;
    if (fine.size() != 2 * n + 1) throw ParameterError("refine_midpoint: fine grid must have 2N+1 nodes");
    const double sd = std::sqrt(sigma2 * (T / double(n)) / 4.0);
    for (std::size_t i = 0; i < n; ++i) {
        fine[2 * i] = coarse[i];
        fine[2 * i + 1] = 0.5 * (coarse[i] + coarse[i + 1]) + sd * s.normal();
    }
    fine[2 * n] = coarse[n];
}

double bridge_mass(double sigma2, double a, double T) {
    if (!(sigma2 > 0) || !(T > 0)) throw ParameterError("bridge_mass: sigma2 and T must be positive");
    return std::exp(-a * a / (2 * T * sigma2)) / std::sqrt(2 * pi * T * sigma2);
}

CircleDiffeo ms_map(const GridPath& xi, double theta) {
    return CircleDiffeo::from_path(xi, theta);
}

GridPath ms_inverse(const CircleDiffeo& phi) {
    const int n = phi.N();
    std::vector<double> v(n + 1);
    const double l0 = std::log(phi.dphi(0));
    for (int i = 0; i <= n; ++i) {
        if (!(phi.dphi(i) > 0)) throw NumericError("ms_inverse: derivative is not positive");
        v[i] = std::log(phi.dphi(i)) - l0;
    }
    v[0] = 0.0;
    return GridPath(std::move(v), 1.0);
}

double energy(const CircleDiffeo& phi) {
    return phi.energy();
}

double cross_ratio(const CircleDiffeo& phi, double s, double t) {
    const double d = phi.value(t) - phi.value(s);
    const double frac = d - std::round(d);
    if (std::abs(frac) < 1e-14) throw SingularArgumentError("cross_ratio: phi(t) = phi(s) mod 1");
    const double ds = phi.deriv(s), dt = phi.deriv(t);
    if (!(ds > 0 && dt > 0)) throw NumericError("cross_ratio: derivative is not positive");
    return pi * std::sqrt(ds * dt) / std::sin(pi * d);
}

BiasProbe bridge_bias_probe(const RunConfig& cfg, double sigma2, double a, int N,
                            const std::function<double(const GridPath&)>& fn) {
    if (N < 2) throw ParameterError("bias probe: need N >= 2");
    return bias_probe(cfg, [&](Stream& s, double& coarse, double& fine) {
        std::vector<double> c(N + 1), f(2 * N + 1);
        sample_bridge_into(s, sigma2, a, 1.0, c);
        refine_midpoint(c, sigma2, 1.0, s, f);
        coarse = fn(GridPath(std::move(c), 1.0));
        fine = fn(GridPath(std::move(f), 1.0));
    });
}

}  // namespace sft
