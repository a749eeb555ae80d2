#include "slipstep/lip.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slipstep {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(field) + " must be positive and finite");
    }
}

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(field) + " must be finite");
    }
}

} // namespace

GaitParams make_params(double g, double h, double mu, double mass,
                       double L_star, double T_star) {
    require_positive(g, "g");
    require_positive(h, "h");
    require_positive(mu, "mu");
    require_positive(mass, "mass");
    require_finite(L_star, "L_star");
    require_positive(T_star, "T_star");
    GaitParams p;
    p.g = g;
    p.h = h;
    p.omega = std::sqrt(g / h);
    p.mu = mu;
    p.mass = mass;
    p.L_star = L_star;
    p.T_star = T_star;
    return p;
}

StepMatrix transition_matrix(double T, double omega) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be >= 0 and finite");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive and finite");
    const double ep = std::exp(omega * T);
    const double em = std::exp(-omega * T);
    StepMatrix m;
    m.a11 = 0.5 * (ep + em);
    m.a12 = 0.5 * (ep - em) / omega;
    m.a21 = 0.5 * omega * (ep - em);
    m.a22 = m.a11;
    return m;
}

StepState flow(const StepState& s0, double t, double omega) {
    const StepMatrix m = transition_matrix(t, omega);
    return {m.a11 * s0.x + m.a12 * s0.xd, m.a21 * s0.x + m.a22 * s0.xd};
}

StepState step_map(const StepState& s0, double L, double T, double omega) {
    StepState s = flow(s0, T, omega);
    s.x -= L;
    return s;
}

StepState fixed_point(double L_star, double T_star, double omega) {
    if (!(T_star > 0.0) || !std::isfinite(T_star)) throw std::invalid_argument("T_star must be positive and finite");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive and finite");
    if (!std::isfinite(L_star)) throw std::invalid_argument("L_star must be finite");
    const double ep = std::exp(omega * T_star);
    StepState s;
    s.x = -0.5 * L_star;
    s.xd = 0.5 * L_star * omega * (ep + 1.0) / (ep - 1.0);
    return s;
}

StepState apply_push(const StepState& s, double impulse, double mass) {
    require_positive(mass, "mass");
    require_finite(impulse, "impulse");
    return {s.x, s.xd + impulse / mass};
}

} // namespace slipstep
