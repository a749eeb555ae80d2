#pragma once

// Friction-limited safety analysis for LIP stepping.
//
// A state is "safe" for a step of duration T when the CoM trajectory keeps
// the required friction mu_r(t) = |x(t)|/h strictly below the available mu
// for the whole step AND the same can be guaranteed one step ahead by a
// suitable step length. The closed-form regions below are the workhorses of
// the step-length/step-time controllers.
//
// Boundary convention: all strict inequalities are evaluated with a margin
// eps = 1e-9 * max(1, mu*h); exact boundary states count as unsafe.

#include <iosfwd>
#include <optional>

#include "slipstep/lip.hpp"

namespace slipstep {

// |x|/h: friction needed to keep the stance foot from sliding at CoM offset x.
double required_friction(double x, double h);

// Stationary point of x(t) at strictly positive time, if one exists
// (requires x0*xd0 < 0 and |xd0| < omega*|x0|).
struct Extremum {
    double t_m;  // time of the stationary point [s]
    double x_m;  // extremal CoM offset [m]
};
std::optional<Extremum> extremum(const StepState& s, double omega);

// Velocity magnitude above which no step length can return the successor
// state to the safe region of a step with duration T: (a11+1)/a12 * mu*h.
double critical_velocity(const GaitParams& p, double T);

// Region membership of an initial step state for duration T.
//   S0: |x0| < mu h                (no slip at the start)
//   ST: |x(T)| < mu h              (no slip at the end)
//   Sm: interior extremum within the friction bound
//   Rm: velocity reverses sign inside the step (extremum is interior)
//   S : no slip for the whole step; equals S0 ∩ ST
//   D : starts safe but exceeds the bound before T
//   A : subset of D recoverable by shortening this step (fixed-border)
struct RegionReport {
    bool in_S0 = false;
    bool in_Sm = false;
    bool in_ST = false;
    bool in_Rm = false;
    bool in_S = false;
    bool in_D = false;
    bool in_A = false;
    std::optional<double> t_m;  // interior |x| extremum, when present
    std::optional<double> x_m;
    double margin_S0 = 0.0;  // mu h - |x0|      (>0 inside)
    double margin_ST = 0.0;  // mu h - |x(T)|    (>0 inside)
};

RegionReport classify_state(const StepState& s, const GaitParams& p, double T);

// Open interval of step lengths (lower, upper); empty when lower >= upper.
struct LengthInterval {
    enum class Kind { safe, convergence, safe_convergence, return_range };
    double lower = 0.0;
    double upper = 0.0;
    Kind kind = Kind::safe;
    bool empty() const { return !(lower < upper); }
    double width() const { return upper - lower; }
    double mid() const { return 0.5 * (lower + upper); }
};

// Step lengths L such that the successor state of a T-step from s is again
// safe (start and end of the following step within the friction bound).
LengthInterval safe_length_range(const StepState& s, const GaitParams& p, double T);

// First time |x(t)| reaches mu h; absent when the trajectory stays inside
// forever (contracting ray). Precondition: |x0| < mu h.
std::optional<double> slip_time(const StepState& s, const GaitParams& p);

// Admissible shortened durations (lo, hi) for the current step so that a
// return step length exists afterwards. Precondition: state in region A
// (classified against T_star).
struct TimeWindow {
    double lower = 0.0;
    double upper = 0.0;
    bool empty() const { return !(lower < upper); }
    double width() const { return upper - lower; }
};
TimeWindow critical_window(const StepState& s, const GaitParams& p);

// Step lengths that place the successor of an already-flown step (ending at
// end_state) back inside the safe region of a following step of duration
// T_next. Empty iff |xd_end| >= critical_velocity(p, T_next).
LengthInterval return_length_range(const StepState& end_state, double T_next,
                                   const GaitParams& p);

// Dense-grid oracle: samples |x(t)| on n_grid+1 uniform nodes of [0, T] and
// applies the same boundary margin. Deliberately ignorant of the region
// algebra; used to cross-check classify_state. Precondition: n_grid >= 1000.
bool brute_force_safe(const StepState& s, const GaitParams& p, double T, int n_grid);

// Writes region boundaries as CSV polylines, columns: region,branch,x,xdot.
// Regions: mu_h and xdot_cr guide lines, S outline, D and A branch outlines.
void export_region_boundaries(std::ostream& os, const GaitParams& p, double T,
                              int n_pts = 200);

} // namespace slipstep
