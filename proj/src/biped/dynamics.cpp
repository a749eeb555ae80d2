#include "slipstep/biped/dynamics.hpp"

#include <cmath>

namespace slipstep::biped {

void body_params(const BipedModel& m, double mass[6], double inertia[6]) {
    mass[0] = m.shank.mass;
    mass[1] = m.thigh.mass;
    mass[2] = m.thigh.mass;
    mass[3] = m.shank.mass;
    mass[4] = m.foot_mass;
    mass[5] = m.torso.mass;
    inertia[0] = m.shank.inertia;
    inertia[1] = m.thigh.inertia;
    inertia[2] = m.thigh.inertia;
    inertia[3] = m.shank.inertia;
    inertia[4] = m.foot_inertia;
    inertia[5] = m.torso.inertia;
}

Vec2 com_acceleration(const BipedModel& m, const Kinematics& k,
                      const Vec6& qddot) {
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    const Vec6 theta_dd = joint_to_abs() * qddot;
    Vec2 acc = Vec2::Zero();
    for (int b = 0; b < 6; ++b) {
        acc.noalias() += mass[b] * (k.J[b] * theta_dd + k.Jdot[b] * k.theta_dot);
    }
    return acc / m.total_mass();
}

Mat6 mass_matrix(const BipedModel& m, const Vec6& q) {
    const Kinematics k = kinematics(m, q, Vec6::Zero());
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    Mat6 M_theta = Mat6::Zero();
    for (int b = 0; b < 6; ++b) {
        M_theta.noalias() += mass[b] * k.J[b].transpose() * k.J[b];
        M_theta(b, b) += inertia[b];
    }
    const Mat6 E = joint_to_abs();
    return E.transpose() * M_theta * E;
}

Vec6 bias_forces(const BipedModel& m, const Vec6& q, const Vec6& qdot) {
    const Kinematics k = kinematics(m, q, qdot);
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    const Vec2 grav{0.0, m.g};
    Vec6 bias_theta = Vec6::Zero();
    for (int b = 0; b < 6; ++b) {
        bias_theta.noalias() +=
            mass[b] * k.J[b].transpose() * (k.Jdot[b] * k.theta_dot + grav);
    }
    return joint_to_abs().transpose() * bias_theta;
}

Vec6 forward_dynamics(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                      const Vec6& tau) {
    return mass_matrix(m, q).ldlt().solve(tau - bias_forces(m, q, qdot));
}

Vec6 inverse_dynamics(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                      const Vec6& qddot) {
    return mass_matrix(m, q) * qddot + bias_forces(m, q, qdot);
}

double total_energy(const BipedModel& m, const Vec6& q, const Vec6& qdot) {
    const Kinematics k = kinematics(m, q, qdot);
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    double e = 0.0;
    for (int b = 0; b < 6; ++b) {
        const Vec2 v = k.J[b] * k.theta_dot;
        e += 0.5 * mass[b] * v.squaredNorm();
        e += 0.5 * inertia[b] * k.theta_dot[b] * k.theta_dot[b];
        e += mass[b] * m.g * k.pos[b].y();
    }
    return e;
}

Reaction reaction(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                  const Vec6& qddot) {
    const Kinematics k = kinematics(m, q, qdot);
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    const Vec6 theta_dd = joint_to_abs() * qddot;

    double fx = 0.0, fy_dyn = 0.0, moment = 0.0, weight_moment = 0.0;
    for (int b = 0; b < 6; ++b) {
        const Vec2 acc = k.J[b] * theta_dd + k.Jdot[b] * k.theta_dot;
        fx += mass[b] * acc.x();
        fy_dyn += mass[b] * acc.y();
        moment += mass[b] * (k.pos[b].x() * acc.y() - k.pos[b].y() * acc.x());
        moment += inertia[b] * theta_dd[b];
        weight_moment += mass[b] * k.pos[b].x();
    }
    // the static stance foot adds weight but no dynamics; its CoM is on the
    // ankle vertical, so it adds no gravity moment either
    Reaction r;
    r.fx = fx;
    r.fy = fy_dyn + m.total_mass() * m.g;
    if (!(r.fy > 0.0)) {
        r.lift_off = true;
        return r;
    }
    r.x_cop = (moment + m.g * weight_moment) / r.fy;
    r.mu_r = std::fabs(fx) / r.fy;
    return r;
}

Vec6 impact(const BipedModel& m, const Vec6& q, const Vec6& qdot_minus,
            double impulse) {
    const Kinematics k = kinematics(m, q, Vec6::Zero());
    const Vec2 F{impulse, 0.0};
    const Vec6 Q = (k.J_torso_mid * joint_to_abs()).transpose() * F;
    return qdot_minus + mass_matrix(m, q).ldlt().solve(Q);
}

ImpactResult impact_with_ground_impulse(const BipedModel& m, const Vec6& q,
                                        const Vec6& qdot_minus, double impulse) {
    // Floating chain: base coordinates (x_f, y_f, phi) of the stance foot
    // (reference at the ankle pin) plus the six absolute link angles. The
    // weld to ground is an impulsive constraint on all three base rates.
    const Mat6 E = joint_to_abs();
    const Kinematics k = kinematics(m, q, Vec6::Zero());
    double mass[6], inertia[6];
    body_params(m, mass, inertia);

    using Mat9 = Eigen::Matrix<double, 9, 9>;
    using Vec9 = Eigen::Matrix<double, 9, 1>;
    Mat9 Mf = Mat9::Zero();

    // moving bodies: velocity = base translation + J_b * theta_dot
    for (int b = 0; b < 6; ++b) {
        Eigen::Matrix<double, 2, 9> Jb = Eigen::Matrix<double, 2, 9>::Zero();
        Jb.block<2, 2>(0, 0).setIdentity();
        Jb.block<2, 6>(0, 3) = k.J[b];
        Mf.noalias() += mass[b] * Jb.transpose() * Jb;
        Mf(3 + b, 3 + b) += inertia[b];
    }
    // stance foot body: translates with the base, rotates with phi = 0
    {
        Eigen::Matrix<double, 2, 9> Jf = Eigen::Matrix<double, 2, 9>::Zero();
        Jf.block<2, 2>(0, 0).setIdentity();
        Jf.col(2) = Vec2{m.foot_com_drop, 0.0};  // d/dphi of com at phi = 0
        Mf.noalias() += m.foot_mass * Jf.transpose() * Jf;
        Mf(2, 2) += m.foot_inertia;
    }

    Vec9 Qf = Vec9::Zero();
    Qf[0] = impulse;
    Qf.tail<6>() = k.J_torso_mid.row(0).transpose() * impulse;

    Vec9 v_minus = Vec9::Zero();
    v_minus.tail<6>() = E * qdot_minus;

    // KKT for Mf (v+ - v-) = Qf + G^T lambda, G v+ = 0, G = [I3 | 0]
    Eigen::Matrix<double, 12, 12> kkt = Eigen::Matrix<double, 12, 12>::Zero();
    kkt.block<9, 9>(0, 0) = Mf;
    kkt.block<3, 3>(0, 9) = -Eigen::Matrix3d::Identity();
    kkt.block<3, 3>(9, 0) = Eigen::Matrix3d::Identity();
    Eigen::Matrix<double, 12, 1> rhs = Eigen::Matrix<double, 12, 1>::Zero();
    rhs.head<9>() = Mf * v_minus + Qf;
    const Eigen::Matrix<double, 12, 1> sol = kkt.fullPivLu().solve(rhs);

    ImpactResult res;
    res.qdot_plus = abs_to_joint() * sol.segment<6>(3);
    res.ground_impulse = Vec2{sol[9], sol[10]};
    return res;
}

} // namespace slipstep::biped
