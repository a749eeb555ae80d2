#include "slipstep/biped/kinematics.hpp"

#include <cmath>

namespace slipstep::biped {

namespace {

inline Vec2 u(double a) { return {std::cos(a), std::sin(a)}; }
inline Vec2 du(double a) { return {-std::sin(a), std::cos(a)}; }

// one summand a * u(theta_k + phase) of a CoM position
struct Term {
    int k;
    double a;
    double phase;
};

constexpr int kStShank = 0, kStThigh = 1, kSwThigh = 2, kSwShank = 3,
              kSwFoot = 4, kTorso = 5;
constexpr double kHalfPi = 1.5707963267948966;

} // namespace

Mat6 joint_to_abs() {
    Mat6 E = Mat6::Zero();
    E(kStShank, 0) = 1.0;
    E(kStThigh, 0) = 1.0;
    E(kStThigh, 1) = 1.0;
    E(kSwThigh, 2) = 1.0;
    E(kSwShank, 2) = 1.0;
    E(kSwShank, 3) = 1.0;
    E(kSwFoot, 4) = 1.0;
    E(kTorso, 5) = 1.0;
    return E;
}

Mat6 abs_to_joint() {
    Mat6 D = Mat6::Zero();
    D(0, kStShank) = 1.0;
    D(1, kStThigh) = 1.0;
    D(1, kStShank) = -1.0;
    D(2, kSwThigh) = 1.0;
    D(3, kSwShank) = 1.0;
    D(3, kSwThigh) = -1.0;
    D(4, kSwFoot) = 1.0;
    D(5, kTorso) = 1.0;
    return D;
}

Kinematics kinematics(const BipedModel& m, const Vec6& q, const Vec6& qdot) {
    Kinematics k;
    const Mat6 E = joint_to_abs();
    k.theta = E * q;
    k.theta_dot = E * qdot;

    const double l_sh = m.shank.length, l_th = m.thigh.length;
    const double r_sh = m.shank.com, r_th = m.thigh.com, r_t = m.torso.com;
    const Vec2 ankle{0.0, m.ankle_height};

    // term lists per moving body, all rooted at the stance ankle
    const std::array<std::array<Term, 5>, 6> terms = {{
        {{{kStShank, r_sh, 0}, {-1, 0, 0}, {-1, 0, 0}, {-1, 0, 0}, {-1, 0, 0}}},
        {{{kStShank, l_sh, 0}, {kStThigh, r_th, 0}, {-1, 0, 0}, {-1, 0, 0}, {-1, 0, 0}}},
        {{{kStShank, l_sh, 0}, {kStThigh, l_th, 0}, {kSwThigh, r_th, 0}, {-1, 0, 0}, {-1, 0, 0}}},
        {{{kStShank, l_sh, 0}, {kStThigh, l_th, 0}, {kSwThigh, l_th, 0}, {kSwShank, r_sh, 0}, {-1, 0, 0}}},
        {{{kStShank, l_sh, 0}, {kStThigh, l_th, 0}, {kSwThigh, l_th, 0}, {kSwShank, l_sh, 0}, {kSwFoot, m.foot_com_drop, -kHalfPi}}},
        {{{kStShank, l_sh, 0}, {kStThigh, l_th, 0}, {kTorso, r_t, 0}, {-1, 0, 0}, {-1, 0, 0}}},
    }};

    auto assemble = [&](const Term* list, int n, Vec2& p, Mat26& J, Mat26& Jd) {
        p = ankle;
        J.setZero();
        Jd.setZero();
        for (int i = 0; i < n; ++i) {
            const Term& t = list[i];
            if (t.k < 0) continue;
            const double a = k.theta[t.k] + t.phase;
            p += t.a * u(a);
            J.col(t.k) += t.a * du(a);
            Jd.col(t.k) += -t.a * u(a) * k.theta_dot[t.k];
        }
    };

    for (int b = 0; b < 6; ++b) {
        assemble(terms[b].data(), 5, k.pos[b], k.J[b], k.Jdot[b]);
    }

    // named points
    k.knee_stance = ankle + l_sh * u(k.theta[kStShank]);
    k.hip = k.knee_stance + l_th * u(k.theta[kStThigh]);
    k.knee_swing = k.hip + l_th * u(k.theta[kSwThigh]);
    k.ankle_swing = k.knee_swing + l_sh * u(k.theta[kSwShank]);

    {
        const Term sole_terms[5] = {{kStShank, l_sh, 0},
                                    {kStThigh, l_th, 0},
                                    {kSwThigh, l_th, 0},
                                    {kSwShank, l_sh, 0},
                                    {kSwFoot, m.ankle_height, -kHalfPi}};
        assemble(sole_terms, 5, k.sole, k.J_sole, k.Jdot_sole);
    }
    {
        const Term mid_terms[3] = {{kStShank, l_sh, 0},
                                   {kStThigh, l_th, 0},
                                   {kTorso, 0.5 * m.torso.length, 0}};
        Mat26 unused;
        assemble(mid_terms, 3, k.torso_mid, k.J_torso_mid, unused);
    }

    // whole-robot CoM; the stance foot is static below the ankle pin
    const double masses[6] = {m.shank.mass, m.thigh.mass, m.thigh.mass,
                              m.shank.mass, m.foot_mass, m.torso.mass};
    const Vec2 stance_foot_com{0.0, m.ankle_height - m.foot_com_drop};
    Vec2 wp = m.foot_mass * stance_foot_com;
    Vec2 wv = Vec2::Zero();
    for (int b = 0; b < 6; ++b) {
        wp += masses[b] * k.pos[b];
        wv += masses[b] * (k.J[b] * k.theta_dot);
    }
    k.com = wp / m.total_mass();
    k.com_vel = wv / m.total_mass();
    return k;
}

Eigen::Vector4d com_state(const BipedModel& m, const Vec6& q, const Vec6& qdot) {
    const Kinematics k = kinematics(m, q, qdot);
    return {k.com.x(), k.com_vel.x(), k.com.y(), k.com_vel.y()};
}

void exchange_support(const Vec6& q, const Vec6& qdot, Vec6& q_out, Vec6& qdot_out) {
    // new stance shank/thigh = old swing ones traversed distal-to-proximal
    // (pi flips); the old stance foot becomes the flat swing sole.
    Vec6 qn, qdn;
    qn[0] = q[2] + q[3] + M_PI;
    qn[1] = -q[3];
    qn[2] = q[0] + q[1] - M_PI;
    qn[3] = -q[1];
    qn[4] = 0.0;
    qn[5] = q[5];
    qdn[0] = qdot[2] + qdot[3];
    qdn[1] = -qdot[3];
    qdn[2] = qdot[0] + qdot[1];
    qdn[3] = -qdot[1];
    qdn[4] = 0.0;
    qdn[5] = qdot[5];
    q_out = qn;
    qdot_out = qdn;
}

} // namespace slipstep::biped
