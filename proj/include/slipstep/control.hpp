#pragma once

// Step-length and step-time controllers on top of the safety regions.
//
// Nominal operation picks, each step, the midpoint of the intersection of
// the safe step-length range with the convergence range (the lengths that
// shrink the Lyapunov measure of the deviation from the desired gait).
// When a push lands the state outside the safe region but still inside the
// friction bound, either the current step is shortened and a return length
// taken (fixed-border), or the desired step time itself is lowered and a
// zero-length intermediate gait is tracked until the primary region is
// regained (moving-border).

#include <optional>

#include "slipstep/lip.hpp"
#include "slipstep/safety.hpp"

namespace slipstep {

enum class StepMode { nominal, fixed_border, moving_border, unrecoverable };
enum class GaitTarget { primary_gait, zero_gait };

struct StepCommand {
    double L = 0.0;
    double T = 0.0;
    StepMode mode = StepMode::nominal;
    GaitTarget target = GaitTarget::primary_gait;
};

// Step lengths that strictly decrease the squared deviation measure
// V = (a21 dx + a22 dxd)^2 of the successor; open interval between the two
// roots of the decrease condition, shifted by L_star. Degenerate (single
// point L_star) when the state sits exactly on the desired gait.
LengthInterval convergence_range(const StepState& s, const GaitParams& p);

// Midpoint of safe_length_range ∩ convergence_range for a T_star step.
// Throws precondition_error when the state is outside the safe region.
// When out_range is given, the intersected interval is stored there.
double step_length_command(const StepState& s, const GaitParams& p,
                           LengthInterval* out_range = nullptr);

// Shorten the current step so it ends before the friction bound is hit and
// step back into the safe region. Precondition: state in region A. Throws
// precondition_error when the return-length interval is empty despite that.
StepCommand fixed_border_adjust(const StepState& s, const GaitParams& p);

// Lower the desired step time to kappa * slip_time and target the zero gait
// (L* = 0) under the shortened cadence. Nominal no-op when the state is
// already safe.
StepCommand moving_border_adjust(const StepState& s, const GaitParams& p,
                                 double kappa = 0.8);

struct SupervisorState {
    GaitTarget active_target = GaitTarget::primary_gait;
    std::optional<double> moving_border_T;  // secondary cadence while zero-gait
};

struct SupervisorOptions {
    double kappa = 0.8;              // moving-border step-time fraction
    bool fixed_border_enabled = true;  // disable to force moving-border on all of D
};

// Per-step dispatch. Mutates sup across steps (interlude entry/exit).
StepCommand supervise(SupervisorState& sup, const StepState& s,
                      const GaitParams& p, const SupervisorOptions& opts = {});

// Splits a total friction coefficient into sagittal/lateral shares
// (C*mu, sqrt(1-C^2)*mu); the shares' squares sum to mu^2. Pre: 0 < C < 1.
struct FrictionSplit {
    double sagittal;
    double lateral;
};
FrictionSplit friction_budget_split(double mu_total, double C);

} // namespace slipstep
