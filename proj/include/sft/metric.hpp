#pragma once

#include <functional>
#include <vector>

namespace sft {

// Smooth 1-periodic function with its first two derivatives.
struct PeriodicFunction {
    std::function<double(double)> f, df, d2f;

    double operator()(double t) const { return f(t); }
};

PeriodicFunction constant_function(double c);
PeriodicFunction cos_mode(int m, double amp = 1.0);  // amp cos(2 pi m t)
PeriodicFunction sin_mode(int m, double amp = 1.0);  // amp sin(2 pi m t)
PeriodicFunction operator+(const PeriodicFunction& a, const PeriodicFunction& b);
PeriodicFunction operator*(double s, const PeriodicFunction& a);
// exp(-1/(1-x^2)), x = (t - center)/width wrapped to the circle; 0 for |x| >= 1.
PeriodicFunction smooth_bump(double center, double width);

// Periodic trapezoid rule on n nodes.
double periodic_trapezoid(const std::function<double(double)>& f, int n = 1 << 10);

// A metric profile rho > 0 on the circle.
class MetricProfile {
public:
    static MetricProfile from_rho(PeriodicFunction rho);
    // rho = 1 / w
    static MetricProfile from_inverse(PeriodicFunction w);
    static MetricProfile constant(double sigma2);

    double rho(double t) const { return rho_.f(t); }
    double drho(double t) const { return rho_.df(t); }
    double d2rho(double t) const { return rho_.d2f(t); }
    double rho2(double t) const {
        const double r = rho_.f(t);
        return r * r;
    }
    // int_0^1 rho
    double sigma2_rho() const { return sigma2_; }
    bool is_constant() const { return constant_; }

    MetricProfile rotated(double tau0) const;
    MetricProfile scaled(double lambda) const;

private:
    explicit MetricProfile(PeriodicFunction rho, bool constant = false);

    PeriodicFunction rho_;
    double sigma2_ = 0.0;
    bool constant_ = false;
};

// h(t) = int_0^t rho / sigma2_rho
double reparam_h(const MetricProfile& rho, double t);

struct NormaliserRoutes {
    double gradient;    // 1/2 int rho'^2 / rho^3
    double schwarzian;  // int S(h) / rho, S(h) by finite differences of h
    double second;      // (1/sigma2_rho) 1/2 int h''^2 / h'^3, same h derivatives
};

NormaliserRoutes normaliser_routes(const MetricProfile& rho, double delta = 5e-3);

// exp{1/2 int rho'^2 / rho^3}
double normaliser_C(const MetricProfile& rho);

// log of (2 pi / s)^{3/2} exp(2 pi^2 / s)
double log_schwarzian_partition(double s);
// n-th derivative of the above in s
double log_schwarzian_partition_derivative(int n, double s);

double log_partition_Z_metric(const MetricProfile& rho);
double partition_Z_metric(const MetricProfile& rho);

// 2 pi^2 k! sigma^{2(k-1)} + 3/2 (k-1)! sigma^{2k}
double truncated_correlator(int k, double sigma2);

// d^k / d eps_1 .. d eps_k log Z(rho_eps) at eps = 0, 1/rho_eps = 1/sigma2 + sum eps_i h_i:
//   (-1)^k (k-2)! sigma^{2(k-1)} sum_{i<j} int h_i' h_j' prod_{l != i,j} h_l
//   + sum over set partitions pi of L^{(|pi|)}(sigma2) prod_{B in pi} (-1)^|B| |B|! sigma^{2(|B|+1)} int prod_{l in B} h_l
double correlator_formula(double sigma2, const std::vector<PeriodicFunction>& h);

// Central finite-difference mixed derivative of log Z(rho_eps).
double fd_mixed_derivative(double sigma2, const std::vector<PeriodicFunction>& h, double step);

struct FdCheck {
    double numeric;
    double formula;
    double rel_gap;  // relative to |formula|, absolute when |formula| < 1e-8
};

FdCheck functional_derivative_check(int k, double sigma2, const std::vector<PeriodicFunction>& h, double step = 1e-4);

// [4pi^4 + 10pi^2 s + 15/4 s^2] int g1 int g2 - 2 s [2pi^2 + 3/2 s] int g1 g2 - s int g1 g2''
double two_point_correlator_smeared(const PeriodicFunction& g1, const PeriodicFunction& g2, double sigma2);

}  // namespace sft
