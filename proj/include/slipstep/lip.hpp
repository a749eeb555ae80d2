#pragma once

// Sagittal linear-inverted-pendulum (LIP) stepping primitives.
//
// Conventions used throughout the library:
//   x     CoM position relative to the stance-foot CoP [m]
//   xd    CoM velocity [m/s]
//   omega sqrt(g/h), the LIP time constant [1/s]
//   L     step length: displacement of the CoP at support exchange [m]
//   T     step duration (single-support time; exchange is instantaneous) [s]
//
// Within a step the CoM obeys xdd = omega^2 * x. At exchange the position
// jumps by -L while the velocity is continuous.

namespace slipstep {

struct StepState {
    double x  = 0.0;
    double xd = 0.0;
};

struct GaitParams {
    double g;       // gravity [m/s^2]
    double h;       // CoM height [m]
    double omega;   // sqrt(g/h) [1/s]
    double mu;      // available friction coefficient (sagittal share)
    double mass;    // total mass [kg]
    double L_star;  // desired step length [m] (sign = walking direction)
    double T_star;  // desired step duration [s]
};

// Validates and assembles GaitParams; omega is derived, never stored stale.
// Throws std::invalid_argument naming the offending field.
GaitParams make_params(double g, double h, double mu, double mass,
                       double L_star, double T_star);

// One-step transition matrix of the step-to-step map, duration T:
//   [x; xd](T) = A(T) [x; xd](0),  A = [[a11 a12],[a21 a22]].
// Entries are built from exp(+-omega T): a11 = a22 = (e + 1/e)/2, etc.
struct StepMatrix {
    double a11, a12, a21, a22;
};

StepMatrix transition_matrix(double T, double omega);

// Closed-form in-step flow for t >= 0.
StepState flow(const StepState& s0, double t, double omega);

// Step-to-step (exchange included) map: s' = A(T) s + [-L, 0].
StepState step_map(const StepState& s0, double L, double T, double omega);

// Period-one gait: the unique state that step_map reproduces for (L*, T*).
// x0* = -L*/2,  xd0* = (L*/2) omega (e^{omega T*}+1)/(e^{omega T*}-1).
StepState fixed_point(double L_star, double T_star, double omega);

// Horizontal impulse applied to the CoM at a step boundary: xd += impulse/mass.
StepState apply_push(const StepState& s, double impulse, double mass);

} // namespace slipstep
