#pragma once

// Forward kinematics of the pinned biped chain.
//
// Internally everything is assembled in absolute link angles
//   theta = (stance shank, stance thigh, swing thigh, swing shank,
//            swing foot, torso),
// a constant invertible linear map of the joint vector q (see model.hpp for
// the q convention). Body b rotates with theta_b, so link inertias land on
// the diagonal, and every CoM position is a fixed linear combination of
// unit vectors u(theta_k + phase), which keeps Jacobians and their time
// derivatives closed-form.

#include <array>

#include <Eigen/Dense>

#include "slipstep/biped/model.hpp"

namespace slipstep::biped {

using Vec2 = Eigen::Vector2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat26 = Eigen::Matrix<double, 2, 6>;

// theta = joint_to_abs() * q and back.
Mat6 joint_to_abs();
Mat6 abs_to_joint();

// Everything downstream needs about one configuration (and velocity).
struct Kinematics {
    Vec6 theta;
    Vec6 theta_dot;

    // moving-body CoM states, indexed by the body's theta coordinate
    std::array<Vec2, 6> pos;
    std::array<Mat26, 6> J;     // d pos / d theta
    std::array<Mat26, 6> Jdot;  // time derivative along theta_dot

    // named points
    Vec2 hip, knee_stance, knee_swing, ankle_swing;
    Vec2 sole;       // swing-sole ground reference (below the swing ankle)
    Mat26 J_sole, Jdot_sole;
    Vec2 torso_mid;  // push application point
    Mat26 J_torso_mid;

    // whole-robot CoM including the static stance foot
    Vec2 com, com_vel;
};

Kinematics kinematics(const BipedModel& m, const Vec6& q, const Vec6& qdot);

// CoM state in LIP coordinates about the stance ankle: (x, xd, y, yd).
Eigen::Vector4d com_state(const BipedModel& m, const Vec6& q, const Vec6& qdot);

// Support-exchange relabel at touchdown: the swing leg becomes the stance
// leg and vice versa; the new frame origin moves to the landed ankle. Exact
// (no approximation) when the old swing sole is flat; the caller handles the
// origin shift in x separately.
void exchange_support(const Vec6& q, const Vec6& qdot, Vec6& q_out, Vec6& qdot_out);

} // namespace slipstep::biped
