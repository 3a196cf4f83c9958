#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sft/mc_engine.hpp"
#include "sft/mobius.hpp"
#include "sft/rng.hpp"
#include "sft/smooth_map.hpp"

namespace sft {

// Path on the uniform grid t_i = i T / N, i = 0..N, with values[0] = 0.
class GridPath {
public:
    GridPath(std::vector<double> values, double T = 1.0);

    int N() const { return static_cast<int>(v_.size()) - 1; }
    double T() const { return T_; }
    double step() const { return T_ / N(); }
    double t(int i) const { return T_ * i / N(); }
    double a() const { return v_.back(); }
    double operator[](int i) const { return v_[i]; }
    std::span<const double> values() const { return v_; }

private:
    std::vector<double> v_;
    double T_;
};

// Circle reparametrisation known at the nodes t_i = i/N through its lift
// phi(t_i) (phi(t_N) = phi(t_0) + 1) and derivative phi'(t_i) > 0.
class CircleDiffeo {
public:
    // Malliavin-Shavgulidze map: phi = theta + int_0^t e^xi / int_0^1 e^xi,
    // integrals by the cumulative trapezoid rule.
    static CircleDiffeo from_path(const GridPath& xi, double theta = 0.0);
    // Exact node data; lift.back() - lift.front() must be 1.
    static CircleDiffeo from_nodes(std::vector<double> lift, std::vector<double> dphi);
    // Nodes of a degree-one lift f (f(t+1) = f(t) + 1 on the nodes used).
    static CircleDiffeo from_map(const SmoothMap& f, int N);
    static CircleDiffeo identity(int N);

    int N() const { return static_cast<int>(lift_.size()) - 1; }
    double theta() const { return lift_.front(); }
    double node(int i) const { return lift_[i]; }
    double dphi(int i) const { return dphi_[i]; }
    std::span<const double> lift() const { return lift_; }
    std::span<const double> derivative() const { return dphi_; }

    // int e^xi and int e^{2 xi} for xi = log phi' - log phi'(0)
    double I() const { return I_; }
    double J() const { return J_; }
    // int phi'^2 (= J / I^2)
    double energy() const { return energy_; }

    // Piecewise-linear evaluation of the lift and of phi' at any real t.
    double value(double t) const;
    double deriv(double t) const;
    // t in [0,1) with value(t) = s mod 1
    double inverse(double s) const;

    // f o phi with exact node values f(phi_i) and f'(phi_i) phi'_i.
    CircleDiffeo post_compose(const SmoothMap& f) const;
    // phi(. + k/N)
    CircleDiffeo rotated(int k) const;
    // phi + d
    CircleDiffeo shifted(double d) const;

private:
    CircleDiffeo() = default;
    void finish_nodes();

    std::vector<double> lift_, dphi_;
    double I_ = 1.0, J_ = 1.0, energy_ = 1.0;
};

// Exact discrete Brownian bridge from 0 to a on [0, T] with variance sigma2
// per unit time; out.size() = N + 1.
void sample_bridge_into(Stream& s, double sigma2, double a, double T, std::span<double> out);
GridPath sample_bridge(double sigma2, double a, double T, int N, Stream& s);

// Levy midpoint refinement of a bridge (or Brownian) path from N to 2N steps.
void refine_midpoint(std::span<const double> coarse, double sigma2, double T, Stream& s, std::span<double> fine);

// exp(-a^2 / (2 T sigma2)) / sqrt(2 pi T sigma2)
double bridge_mass(double sigma2, double a, double T);

CircleDiffeo ms_map(const GridPath& xi, double theta = 0.0);
// log phi' - log phi'(0) at the nodes.
GridPath ms_inverse(const CircleDiffeo& phi);
double energy(const CircleDiffeo& phi);

// pi sqrt(phi'(s) phi'(t)) / sin(pi (phi(t) - phi(s)))
double cross_ratio(const CircleDiffeo& phi, double s, double t);

// Paired grid-N / grid-2N estimate of E[fn(xi)] under the normalised bridge.
BiasProbe bridge_bias_probe(const RunConfig& cfg, double sigma2, double a, int N,
                            const std::function<double(const GridPath&)>& fn);

}  // namespace sft
