#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sft {

// Value and first three derivatives at a point.
struct Jet3 {
    double f = 0, d1 = 0, d2 = 0, d3 = 0;
};

struct EndpointData {
    double f0, f1;
    double d1_0, d1_1;
    double d2_0, d2_1;
    double d3_0, d3_1;
};

// A C^3 map with analytic derivative evaluators. Evaluation outside [0,1]
// is allowed (circle maps are evaluated on their lift); domain checks live
// in the operations that need them.
class SmoothMap {
public:
    using Eval = std::function<Jet3(double)>;

    SmoothMap(Eval eval, std::string name = "map");

    Jet3 jet(double t) const { return eval_(t); }
    double operator()(double t) const { return eval_(t).f; }
    double d1(double t) const { return eval_(t).d1; }
    double d2(double t) const { return eval_(t).d2; }
    double d3(double t) const { return eval_(t).d3; }

    const EndpointData& endpoints() const { return ends_; }
    const std::string& name() const { return name_; }

    // f', f'', f''' agree at 0 and 1, i.e. the derivative descends to the circle.
    bool periodic_derivatives(double tol = 1e-10) const;
    // f(0) = 0 and f(1) = 1.
    bool fixes_endpoints(double tol = 1e-12) const;
    // log f'(1) - log f'(0)
    double endpoint_shift() const;

private:
    Eval eval_;
    std::string name_;
    EndpointData ends_;
};

SmoothMap identity_map();

// t / (t + k(1-t)), k > 0: the real fractional-linear maps fixing 0 and 1.
SmoothMap fractional_linear(double k);

// t + eps sin(2 pi m t) / (2 pi m), |eps| < 1: a circle diffeomorphism.
SmoothMap sine_perturbation(double eps, int m);

// (e^{lambda t} - 1) / (e^lambda - 1). Schwarzian -lambda^2/2, shift b = lambda.
SmoothMap exp_map(double lambda);

// t + c sin^2(pi t), |c| < 1/pi.
SmoothMap sine_squared_bump(double c);

// Raw maps used as calculus fixtures (not reparametrisations of [0,1]).
SmoothMap exponential();
SmoothMap tangent_lift(double alpha);  // tan(alpha t - alpha/2)

// g after f, derivatives via Faa di Bruno.
SmoothMap compose(const SmoothMap& g, const SmoothMap& f);

Jet3 compose_jets(const Jet3& g_at_f, const Jet3& f);

}  // namespace sft
