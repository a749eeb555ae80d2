#pragma once

// Per-step joint-trajectory planning.
//
// Each step is a fifth-degree polynomial in every joint,
//   q(t) = q0 + qd0 t + c1 t^2 + c2 t^3 + c3 t^4 + c4 t^5,
// chosen to minimize the step index
//   J = int_0^T ( (xdd_com - omega^2 x_com)^2 + rho (y_sole - y_d)^2 ) dt
// subject to the touchdown contract. The terminal configuration and rates
// are pinned exactly by construction: a boundary-state solve places the
// swing sole flat at (L, 0) at rest, the torso upright, and the CoM on the
// pendulum flow at time T; matching (c3, c4) to that endpoint per joint
// leaves (c1, c2) as the 12 free unknowns. The remaining conditions (zero
// centre of pressure at both step ends, knee-direction limits at
// mid-step) are enforced by an augmented-Lagrangian outer loop around a
// quasi-Newton inner descent. Deterministic: fixed node counts, no RNG.

#include <Eigen/Dense>

#include "slipstep/biped/dynamics.hpp"
#include "slipstep/biped/model.hpp"

namespace slipstep::biped {

struct BoundaryState {
    Vec6 q = Vec6::Zero();
    Vec6 qdot = Vec6::Zero();
};

// Configuration with the stance ankle pinned at the origin, the swing sole
// flat on the ground at x = sole_x, the torso upright, and the whole-body
// CoM at (com_x, com_h); rates realize CoM velocity (com_xd, 0) with the
// swing sole, sole pitch, and torso at rest. Newton solve; throws
// std::runtime_error with the residual when the pose is out of reach.
BoundaryState solve_boundary_state(const BipedModel& m, double sole_x,
                                   double com_x, double com_xd, double com_h,
                                   const Vec6* q_guess = nullptr);

struct QuinticPlan {
    Vec6 q0 = Vec6::Zero();
    Vec6 qdot0 = Vec6::Zero();
    Vec6 c1 = Vec6::Zero(), c2 = Vec6::Zero(), c3 = Vec6::Zero(), c4 = Vec6::Zero();
    double T = 0.0;

    Vec6 q(double t) const;
    Vec6 qdot(double t) const;
    Vec6 qddot(double t) const;
};

// Quintic hitting (end.q, end.qdot) at T for any (c1, c2): c3, c4 recovered
// per joint from the two endpoint conditions.
QuinticPlan assemble_plan(const Vec6& q0, const Vec6& qdot0,
                          const BoundaryState& end, double T,
                          const Vec6& c1, const Vec6& c2);

// c3 = c4 = 0; the cubic boundary interpolant (optimizer start).
QuinticPlan cubic_plan(const Vec6& q0, const Vec6& qdot0,
                       const BoundaryState& end, double T);

// Unique quintic with zero acceleration at both ends; the comparison
// baseline that knows nothing about the pendulum index.
QuinticPlan min_jerk_plan(const Vec6& q0, const Vec6& qdot0,
                          const BoundaryState& end, double T);

struct PlannerConfig {
    double rho = 100.0;           // swing-sole tracking weight
    double apex = 0.02;           // swing-sole bump height [m]
    double clearance_weight = 1e3; // hinge on negative sole height
    double knee_weight = 1e4;     // hinge on mid-step knee direction
    int nodes = 101;              // Simpson nodes (odd, >= 3)
    int max_outer = 6;            // multiplier updates
    int max_inner = 80;           // quasi-Newton iterations per outer round
    double cop_tol = 1e-7;        // endpoint CoP feasibility target [m]
    double grad_tol = 1e-8;
};

struct PlanDiagnostics {
    double objective = 0.0;       // Simpson value of the step index
    double cop0 = 0.0, copT = 0.0; // endpoint CoP residuals [m]
    double max_defect = 0.0;      // max |xdd_com - omega^2 x_com| at nodes
    double knee_margin = 0.0;     // min of the signed knee clearances checked
    double min_clearance = 0.0;   // min swing-sole height at interior nodes
    int outer_iters = 0;
    int inner_iters = 0;
    bool converged = false;
};

// Desired swing-sole height profile, apex at mid-step, zero at both ends.
double swing_profile(double t, double T, double apex);

// Plans one step from the measured state (q0, qdot0): the CoM target at T
// is the pendulum flow of the measured CoM state, the sole lands at L.
// Throws std::runtime_error with residual diagnostics when the boundary
// solve fails; an unconverged optimization is reported through diag, not
// thrown (the plan is still boundary-exact).
QuinticPlan plan_step(const BipedModel& m, const Vec6& q0, const Vec6& qdot0,
                      double L, double T, double omega, double com_h,
                      const PlannerConfig& cfg, PlanDiagnostics* diag = nullptr);

// max |xdd_com - omega^2 x_com| of a plan, sampled on `nodes` points.
double lip_defect(const BipedModel& m, const QuinticPlan& plan, double omega,
                  int nodes);

} // namespace slipstep::biped
