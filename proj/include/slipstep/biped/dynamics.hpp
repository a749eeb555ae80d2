#pragma once

// Pinned-chain dynamics in joint coordinates q.
//
// M(q) qdd + bias(q, qd) = tau, with bias containing both velocity products
// and gravity. Assembled from CoM Jacobians:
//   M_theta = sum_b m_b J_b^T J_b + diag(I_b),   M = E^T M_theta E,
//   bias    = E^T (sum_b m_b J_b^T (Jdot_b thd + g e_y)).
// Ground interaction of the flat stance foot is monitored, not simulated:
// reaction() reports the contact force and CoP demanded by a motion.

#include <Eigen/Dense>

#include "slipstep/biped/kinematics.hpp"
#include "slipstep/biped/model.hpp"

namespace slipstep::biped {

// Mass and CoM inertia of the six moving bodies in theta order
// (stance shank, stance thigh, swing thigh, swing shank, swing foot, torso).
void body_params(const BipedModel& m, double mass[6], double inertia[6]);

// Whole-robot CoM acceleration for the motion (k, qddot); the static stance
// foot contributes rest mass only.
Vec2 com_acceleration(const BipedModel& m, const Kinematics& k,
                      const Vec6& qddot);

Mat6 mass_matrix(const BipedModel& m, const Vec6& q);
Vec6 bias_forces(const BipedModel& m, const Vec6& q, const Vec6& qdot);

// qdd from applied joint torques.
Vec6 forward_dynamics(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                      const Vec6& tau);

// tau required for a given acceleration.
Vec6 inverse_dynamics(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                      const Vec6& qddot);

// kinetic + gravitational potential energy of the moving bodies
double total_energy(const BipedModel& m, const Vec6& q, const Vec6& qdot);

// Ground reaction under the stance sole for the motion (q, qd, qdd).
struct Reaction {
    double fx = 0.0;     // tangential force on the robot [N]
    double fy = 0.0;     // normal force [N]
    double x_cop = 0.0;  // centre of pressure about the ankle [m]
    double mu_r = 0.0;   // |fx| / fy, friction demand
    bool lift_off = false;  // fy <= 0: CoP/mu_r meaningless
};
Reaction reaction(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                  const Vec6& qddot);

// Instantaneous velocity jump from a horizontal impulse at the torso
// midpoint, with the stance ankle pinned: qd+ = qd- + M^-1 J_mid^T [F, 0].
Vec6 impact(const BipedModel& m, const Vec6& q, const Vec6& qdot_minus,
            double impulse);

// Same impact resolved on the floating (unpinned) chain with an impulsive
// pin constraint at the stance ankle, via the full KKT system. Returns the
// post-impact joint rates and the constraint impulse the pin must supply;
// total CoM momentum change equals [impulse, 0] + ground_impulse exactly.
// Agrees with impact() but is assembled independently; kept as the
// momentum-bookkeeping oracle.
struct ImpactResult {
    Vec6 qdot_plus;
    Vec2 ground_impulse;
};
ImpactResult impact_with_ground_impulse(const BipedModel& m, const Vec6& q,
                                        const Vec6& qdot_minus, double impulse);

} // namespace slipstep::biped
