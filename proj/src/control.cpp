#include "slipstep/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slipstep/errors.hpp"

namespace slipstep {

LengthInterval convergence_range(const StepState& s, const GaitParams& p) {
    const StepMatrix m = transition_matrix(p.T_star, p.omega);
    const StepState fp = fixed_point(p.L_star, p.T_star, p.omega);
    const double dx = s.x - fp.x;
    const double dxd = s.xd - fp.xd;
    // Roots of the decrease condition for V = (a21 dx + a22 dxd)^2.
    const double dL1 = (2.0 * m.a11 + 1.0) * dx +
                       (2.0 * m.a11 * m.a11 - 1.0 + m.a11) / m.a21 * dxd;
    const double dL2 = (2.0 * m.a11 - 1.0) * dx +
                       (2.0 * m.a11 * m.a11 - 1.0 - m.a11) / m.a21 * dxd;
    LengthInterval li;
    li.kind = LengthInterval::Kind::convergence;
    li.lower = p.L_star + std::min(dL1, dL2);
    li.upper = p.L_star + std::max(dL1, dL2);
    return li;
}

double step_length_command(const StepState& s, const GaitParams& p,
                           LengthInterval* out_range) {
    const LengthInterval safe = safe_length_range(s, p, p.T_star);
    if (safe.empty()) {
        throw precondition_error("step_length_command: state has no safe step length");
    }
    const LengthInterval conv = convergence_range(s, p);
    LengthInterval both;
    both.kind = LengthInterval::Kind::safe_convergence;
    both.lower = std::max(safe.lower, conv.lower);
    both.upper = std::min(safe.upper, conv.upper);
    // Degenerate (lower == upper) is legitimate: it happens exactly on the
    // desired gait, where the convergence range collapses onto L_star.
    if (both.lower > both.upper) {
        throw precondition_error("step_length_command: safe and convergence ranges do not meet");
    }
    if (out_range) *out_range = both;
    return both.mid();
}

StepCommand fixed_border_adjust(const StepState& s, const GaitParams& p) {
    const TimeWindow w = critical_window(s, p);  // throws unless state in A
    const double margin = 0.05 * w.width();
    const double T = std::clamp(p.T_star, w.lower + margin, w.upper - margin);
    const StepState end = flow(s, T, p.omega);
    const LengthInterval rr = return_length_range(end, p.T_star, p);
    if (rr.empty()) {
        throw precondition_error("fixed_border_adjust: empty return-length interval");
    }
    StepCommand cmd;
    cmd.L = rr.mid();
    cmd.T = T;
    cmd.mode = StepMode::fixed_border;
    cmd.target = GaitTarget::primary_gait;
    return cmd;
}

StepCommand moving_border_adjust(const StepState& s, const GaitParams& p,
                                 double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw std::invalid_argument("kappa must lie in (0, 1)");
    }
    StepCommand cmd;
    const RegionReport r = classify_state(s, p, p.T_star);
    if (r.in_S) {
        cmd.L = p.L_star;
        cmd.T = p.T_star;
        cmd.mode = StepMode::nominal;
        cmd.target = GaitTarget::primary_gait;
        return cmd;
    }
    const auto ts = slip_time(s, p);
    if (!ts) {
        // Orbit peaks within the bound (possible only in the boundary band):
        // nothing to shorten against; treat as nominal.
        cmd.L = p.L_star;
        cmd.T = p.T_star;
        cmd.mode = StepMode::nominal;
        cmd.target = GaitTarget::primary_gait;
        return cmd;
    }
    const double T_m = kappa * *ts;
    // Any T_m below the slip time keeps this step inside the bound, so the
    // state lies in the safe region of the shortened cadence by construction.
    GaitParams zero = p;
    zero.L_star = 0.0;
    zero.T_star = T_m;
    cmd.L = step_length_command(s, zero);
    cmd.T = T_m;
    cmd.mode = StepMode::moving_border;
    cmd.target = GaitTarget::zero_gait;
    return cmd;
}

StepCommand supervise(SupervisorState& sup, const StepState& s,
                      const GaitParams& p, const SupervisorOptions& opts) {
    const RegionReport r = classify_state(s, p, p.T_star);

    if (sup.active_target == GaitTarget::zero_gait) {
        if (r.in_S) {
            // Primary region regained: restore the desired gait immediately.
            sup.active_target = GaitTarget::primary_gait;
            sup.moving_border_T.reset();
        } else if (r.in_S0 && sup.moving_border_T) {
            const double T_m = *sup.moving_border_T;
            const RegionReport rm = classify_state(s, p, T_m);
            if (rm.in_S) {
                GaitParams zero = p;
                zero.L_star = 0.0;
                zero.T_star = T_m;
                StepCommand cmd;
                cmd.L = step_length_command(s, zero);
                cmd.T = T_m;
                cmd.mode = StepMode::moving_border;
                cmd.target = GaitTarget::zero_gait;
                return cmd;
            }
            // Disturbed again mid-interlude: fall through and re-adjust.
        }
    }

    if (r.in_S) {
        StepCommand cmd;
        cmd.L = step_length_command(s, p);
        cmd.T = p.T_star;
        cmd.mode = StepMode::nominal;
        cmd.target = GaitTarget::primary_gait;
        return cmd;
    }
    if (!r.in_S0) {
        StepCommand cmd;
        cmd.L = p.L_star;
        cmd.T = p.T_star;
        cmd.mode = StepMode::unrecoverable;
        cmd.target = GaitTarget::primary_gait;
        return cmd;
    }
    if (opts.fixed_border_enabled && r.in_A) {
        try {
            StepCommand cmd = fixed_border_adjust(s, p);
            sup.active_target = GaitTarget::primary_gait;
            sup.moving_border_T.reset();
            return cmd;
        } catch (const precondition_error&) {
            // Return interval collapsed; the time-adaptation route still works.
        }
    }
    StepCommand cmd = moving_border_adjust(s, p, opts.kappa);
    if (cmd.mode == StepMode::moving_border) {
        sup.active_target = GaitTarget::zero_gait;
        sup.moving_border_T = cmd.T;
    }
    return cmd;
}

FrictionSplit friction_budget_split(double mu_total, double C) {
    if (!(mu_total > 0.0) || !std::isfinite(mu_total)) {
        throw std::invalid_argument("mu_total must be positive and finite");
    }
    if (!(C > 0.0 && C < 1.0)) {
        throw std::invalid_argument("C must lie strictly between 0 and 1");
    }
    return {C * mu_total, std::sqrt(1.0 - C * C) * mu_total};
}

} // namespace slipstep
