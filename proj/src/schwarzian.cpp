#include "sft/schwarzian.hpp"

#include "sft/errors.hpp"

namespace sft {

double schwarzian(const Jet3& j) {
    if (!(j.d1 > 0)) throw NumericError("schwarzian: derivative is not positive");
    const double r = j.d2 / j.d1;
    return j.d3 / j.d1 - 1.5 * r * r;
}

double schwarzian(const SmoothMap& f, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("schwarzian: t outside [0,1]");
    return schwarzian(f.jet(t));
}

SidePair schwarzian_chain_check(const SmoothMap& f, const SmoothMap& g, double t) {
    const Jet3 jf = f.jet(t);
    const Jet3 jg = g.jet(jf.f);
    const double lhs = schwarzian(compose_jets(jg, jf));
    const double rhs = schwarzian(jf) + schwarzian(jg) * jf.d1 * jf.d1;
    return {lhs, rhs};
}

SidePair tan_lift_check(const SmoothMap& phi, double alpha, double t) {
    const Jet3 jp = phi.jet(t);
    const Jet3 jt = tangent_lift(alpha).jet(jp.f);
    // needs alpha > 0 so that the tan lift is increasing
    const double lhs = schwarzian(compose_jets(jt, jp));
    const double rhs = schwarzian(jp) + 2.0 * alpha * alpha * jp.d1 * jp.d1;
    return {lhs, rhs};
}

}  // namespace sft
