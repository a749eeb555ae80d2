#include "slipstep/safety.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "slipstep/errors.hpp"

namespace slipstep {

namespace {

double margin_eps(double mu_h) { return 1e-9 * std::max(1.0, mu_h); }

// v strictly below b, with the shared boundary margin.
bool below(double v, double b, double eps) { return v < b - eps; }
bool above(double v, double b, double eps) { return v > b + eps; }

void write_point(std::ostream& os, const char* region, const char* branch,
                 double x, double xd) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g\n", region, branch, x, xd);
    os << buf;
}

} // namespace

double required_friction(double x, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive and finite");
    return std::fabs(x) / h;
}

std::optional<Extremum> extremum(const StepState& s, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive and finite");
    // Interior stationary point requires motion toward the origin that is too
    // slow to cross it: x0*xd0 < 0 and |xd0| < omega|x0|.
    if (!(s.x * s.xd < 0.0)) return std::nullopt;
    if (!(std::fabs(s.xd) < omega * std::fabs(s.x))) return std::nullopt;
    const double num = omega * s.x - s.xd;
    const double den = omega * s.x + s.xd;
    Extremum e;
    e.t_m = 0.5 / omega * std::log(num / den);
    e.x_m = std::copysign(std::sqrt(num * den) / omega, s.x);
    return e;
}

double critical_velocity(const GaitParams& p, double T) {
    const StepMatrix m = transition_matrix(T, p.omega);
    return (m.a11 + 1.0) / m.a12 * (p.mu * p.h);
}

RegionReport classify_state(const StepState& s, const GaitParams& p, double T) {
    const double mu_h = p.mu * p.h;
    const double eps = margin_eps(mu_h);
    const StepMatrix m = transition_matrix(T, p.omega);
    const double xT = m.a11 * s.x + m.a12 * s.xd;
    const double xdT = m.a21 * s.x + m.a22 * s.xd;

    RegionReport r;
    r.margin_S0 = mu_h - std::fabs(s.x);
    r.margin_ST = mu_h - std::fabs(xT);
    r.in_S0 = below(std::fabs(s.x), mu_h, eps);
    r.in_ST = below(std::fabs(xT), mu_h, eps);
    // Velocity changes sign inside the step: xd(0) and xd(T) oppose. Endpoint
    // stationary points (xd exactly zero) fall into the complement on purpose.
    r.in_Rm = s.xd * xdT < 0.0;

    const double c2 = p.omega * p.omega * s.x * s.x - s.xd * s.xd;
    if (c2 > 0.0) {
        r.in_Sm = below(std::sqrt(c2) / p.omega, mu_h, eps);
    }
    if (auto e = extremum(s, p.omega)) {
        r.t_m = e->t_m;
        r.x_m = e->x_m;
    }

    // Union of the extremum route and the monotone route; algebraically equal
    // to S0 ∩ ST (the interior extremum never exceeds |x0|).
    r.in_S = r.in_Rm ? (r.in_S0 && r.in_ST && r.in_Sm) : (r.in_S0 && r.in_ST);

    r.in_D = r.in_S0 && above(std::fabs(xT), mu_h, eps);

    if (r.in_D) {
        const double xd_cr = (m.a11 + 1.0) / m.a12 * mu_h;
        const double eps_v = 1e-9 * std::max(1.0, xd_cr);
        const double c = s.xd * s.xd - p.omega * p.omega * s.x * s.x;
        if (s.x * s.xd < 0.0) {
            r.in_A = c <= 0.0 || below(std::sqrt(c), xd_cr, eps_v);
        } else if (s.x * s.xd > 0.0) {
            r.in_A = below(std::fabs(s.xd), xd_cr, eps_v);
        }
    }
    return r;
}

LengthInterval safe_length_range(const StepState& s, const GaitParams& p, double T) {
    const double mu_h = p.mu * p.h;
    const StepMatrix m = transition_matrix(T, p.omega);
    const double xT = m.a11 * s.x + m.a12 * s.xd;
    // Successor start bound: |xT - L| < mu h.
    const double l0 = xT - mu_h;
    const double u0 = xT + mu_h;
    // Successor end bound: |a11 (xT - L) + a12 xd(T)| < mu h.
    const double mid = (2.0 * m.a11 - 1.0 / m.a11) * s.x + 2.0 * m.a12 * s.xd;
    const double lT = mid - mu_h / m.a11;
    const double uT = mid + mu_h / m.a11;
    LengthInterval li;
    li.kind = LengthInterval::Kind::safe;
    li.lower = std::max(l0, lT);
    li.upper = std::min(u0, uT);
    return li;
}

std::optional<double> slip_time(const StepState& s, const GaitParams& p) {
    const double mu_h = p.mu * p.h;
    const double eps = margin_eps(mu_h);
    if (!(std::fabs(s.x) < mu_h - eps)) {
        throw precondition_error("slip_time: state already at or beyond the friction bound");
    }
    const double w = p.omega;
    const double out = s.xd + w * s.x;  // 2 omega * coefficient of the growing mode
    const double c = s.xd * s.xd - w * w * s.x * s.x;
    const double scale = std::max({1.0, std::fabs(s.xd), w * std::fabs(s.x)});
    if (std::fabs(out) < 1e-14 * scale) {
        return std::nullopt;  // contracting ray: |x| decays forever
    }
    const double num = w * mu_h + std::sqrt(w * w * mu_h * mu_h + c);
    return std::log(num / std::fabs(out)) / w;
}

TimeWindow critical_window(const StepState& s, const GaitParams& p) {
    const RegionReport r = classify_state(s, p, p.T_star);
    if (!r.in_A) {
        throw precondition_error("critical_window: state is not in the recoverable region A");
    }
    const double mu_h = p.mu * p.h;
    const double w = p.omega;
    const double xd_cr = critical_velocity(p, p.T_star);
    const double c = s.xd * s.xd - w * w * s.x * s.x;

    TimeWindow tw;
    if (c <= xd_cr * xd_cr - w * w * mu_h * mu_h) {
        // Velocity stays subcritical until the slip instant: any earlier stop works.
        auto ts = slip_time(s, p);
        tw.lower = 0.0;
        tw.upper = ts ? *ts : p.T_star;  // in_D guarantees a crossing; fallback is defensive
    } else {
        const double root = std::sqrt(xd_cr * xd_cr - c);
        const double out = std::fabs(s.xd + w * s.x);
        tw.lower = std::log(std::max(1.0, (xd_cr - root) / out)) / w;
        tw.upper = std::log((xd_cr + root) / out) / w;
    }
    return tw;
}

LengthInterval return_length_range(const StepState& end_state, double T_next,
                                   const GaitParams& p) {
    const double mu_h = p.mu * p.h;
    const StepMatrix m = transition_matrix(T_next, p.omega);
    // Successor position must land where both the start and the end of the
    // next step stay inside the bound.
    const double xr = std::min(mu_h, (mu_h - m.a12 * end_state.xd) / m.a11);
    const double xl = std::max(-mu_h, (-mu_h - m.a12 * end_state.xd) / m.a11);
    LengthInterval li;
    li.kind = LengthInterval::Kind::return_range;
    li.lower = end_state.x - xr;
    li.upper = end_state.x - xl;
    return li;
}

bool brute_force_safe(const StepState& s, const GaitParams& p, double T, int n_grid) {
    if (n_grid < 1000) throw std::invalid_argument("n_grid must be >= 1000");
    const double mu_h = p.mu * p.h;
    const double eps = margin_eps(mu_h);
    // March the two exponential modes across the grid; identical to the
    // closed-form flow at every node, no region algebra involved.
    const double dt = T / n_grid;
    const double ep = std::exp(p.omega * dt);
    const double em = 1.0 / ep;
    double a = 0.5 * (s.x + s.xd / p.omega);  // growing mode
    double b = 0.5 * (s.x - s.xd / p.omega);  // decaying mode
    double peak = std::fabs(s.x);
    for (int k = 0; k < n_grid; ++k) {
        a *= ep;
        b *= em;
        peak = std::max(peak, std::fabs(a + b));
    }
    return below(peak, mu_h, eps);
}

void export_region_boundaries(std::ostream& os, const GaitParams& p, double T,
                              int n_pts) {
    if (n_pts < 2) throw std::invalid_argument("n_pts must be >= 2");
    const double mu_h = p.mu * p.h;
    const StepMatrix m = transition_matrix(T, p.omega);
    const double xd_cr = (m.a11 + 1.0) / m.a12 * mu_h;
    const double v_inner = (m.a11 - 1.0) / m.a12 * mu_h;  // S corner velocity
    const double v_max = 1.5 * xd_cr;

    os << "region,branch,x,xdot\n";

    for (int sgn : {+1, -1}) {
        const char* br = sgn > 0 ? "pos" : "neg";
        write_point(os, "mu_h", br, sgn * mu_h, -v_max);
        write_point(os, "mu_h", br, sgn * mu_h, v_max);
        write_point(os, "xdot_cr", br, -mu_h, sgn * xd_cr);
        write_point(os, "xdot_cr", br, mu_h, sgn * xd_cr);
    }

    // Safe-region parallelogram (closed outline).
    write_point(os, "S", "outline", -mu_h, v_inner);
    write_point(os, "S", "outline", -mu_h, xd_cr);
    write_point(os, "S", "outline", mu_h, -v_inner);
    write_point(os, "S", "outline", mu_h, -xd_cr);
    write_point(os, "S", "outline", -mu_h, v_inner);

    // D branches: strip portions above/below the safe band (clipped at v_max).
    for (int sgn : {+1, -1}) {
        const char* br = sgn > 0 ? "upper" : "lower";
        write_point(os, "D", br, -sgn * mu_h, sgn * v_max);
        write_point(os, "D", br, -sgn * mu_h, sgn * xd_cr);
        write_point(os, "D", br, sgn * mu_h, -sgn * v_inner);
        write_point(os, "D", br, sgn * mu_h, sgn * v_max);
    }

    // A outer boundary: orbit-constant arc on the incoming quadrant joined to
    // the critical-velocity line on the outgoing one.
    for (int sgn : {+1, -1}) {
        const char* br = sgn > 0 ? "upper" : "lower";
        for (int k = 0; k < n_pts; ++k) {
            const double x = -sgn * mu_h * (1.0 - double(k) / (n_pts - 1));
            const double xd = sgn * std::sqrt(xd_cr * xd_cr + p.omega * p.omega * x * x);
            write_point(os, "A", br, x, xd);
        }
        write_point(os, "A", br, sgn * mu_h, sgn * xd_cr);
    }
}

} // namespace slipstep
