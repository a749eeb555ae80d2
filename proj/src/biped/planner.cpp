#include "slipstep/biped/planner.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "slipstep/lip.hpp"

namespace slipstep::biped {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

Vec2 u(double a) { return {std::cos(a), std::sin(a)}; }

// Two-link reach from base to target; bend = +1 folds the middle joint
// toward +x for a mostly-upward chain, -1 for a mostly-downward one.
// Returns absolute angles (proximal, distal). Guess quality only; the
// Newton polish owns accuracy.
void two_link(const Vec2& base, const Vec2& target, double la, double lb,
              double bend, double& ang_a, double& ang_b) {
    Vec2 d = target - base;
    double dist = d.norm();
    const double lo = std::fabs(la - lb) + 1e-6, hi = la + lb - 1e-6;
    if (dist < lo) dist = lo;
    if (dist > hi) dist = hi;
    const double phi = std::atan2(d.y(), d.x());
    double ca = (la * la + dist * dist - lb * lb) / (2.0 * la * dist);
    ca = std::clamp(ca, -1.0, 1.0);
    ang_a = phi - bend * std::acos(ca);
    const Vec2 knee = base + la * u(ang_a);
    const Vec2 r = target - knee;
    ang_b = std::atan2(r.y(), r.x());
}

Vec6 default_pose_guess(const BipedModel& m, double sole_x, double com_x,
                        double com_h) {
    // hip a little below the CoM target; exact height is Newton's problem
    const double hip_y = std::min(com_h + 0.6 * m.torso.com,
                                  m.ankle_height + 0.98 * m.leg_length());
    const Vec2 hip{com_x, hip_y};
    const Vec2 ankle{0.0, m.ankle_height};
    const Vec2 swing_ankle{sole_x, m.ankle_height};
    double a1, a2, a3, a4;
    two_link(ankle, hip, m.shank.length, m.thigh.length, 1.0, a1, a2);
    two_link(hip, swing_ankle, m.thigh.length, m.shank.length, -1.0, a3, a4);
    Vec6 q;
    q << a1, a2 - a1, a3, a4 - a3, 0.0, kHalfPi;
    return q;
}

// stacked position residual rows: swing sole (2), whole-body CoM (2)
Eigen::Matrix<double, 4, 6> contract_jacobian(const BipedModel& m,
                                              const Kinematics& k) {
    double mass[6], inertia[6];
    body_params(m, mass, inertia);
    Mat26 J_com = Mat26::Zero();
    for (int b = 0; b < 6; ++b) J_com += mass[b] * k.J[b];
    J_com /= m.total_mass();
    const Mat6 E = joint_to_abs();
    Eigen::Matrix<double, 4, 6> J;
    J.topRows<2>() = k.J_sole * E;
    J.bottomRows<2>() = J_com * E;
    return J;
}

} // namespace

double swing_profile(double t, double T, double apex) {
    const double s = std::sin(M_PI * t / T);
    return apex * s * s;
}

BoundaryState solve_boundary_state(const BipedModel& m, double sole_x,
                                   double com_x, double com_xd, double com_h,
                                   const Vec6* q_guess) {
    Eigen::Vector4d target;
    target << sole_x, 0.0, com_x, com_h;

    auto residual = [&](const Vec6& q) {
        const Kinematics k = kinematics(m, q, Vec6::Zero());
        Eigen::Vector4d r;
        r << k.sole.x(), k.sole.y(), k.com.x(), k.com.y();
        return Eigen::Vector4d(r - target);
    };

    Vec6 q = q_guess ? *q_guess : default_pose_guess(m, sole_x, com_x, com_h);
    q[4] = 0.0;
    q[5] = kHalfPi;

    Eigen::Vector4d r = residual(q);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
        if (r.lpNorm<Eigen::Infinity>() < 1e-12) {
            ok = true;
            break;
        }
        const Kinematics k = kinematics(m, q, Vec6::Zero());
        const Eigen::Matrix4d J =
            contract_jacobian(m, k).leftCols<4>();
        const Eigen::Vector4d step = J.fullPivLu().solve(r);
        // damped update: shrink until the residual actually drops
        double alpha = 1.0;
        const double base = r.norm();
        bool advanced = false;
        for (int half = 0; half < 30; ++half) {
            Vec6 trial = q;
            trial.head<4>() -= alpha * step;
            const Eigen::Vector4d rt = residual(trial);
            if (rt.norm() < base * (1.0 - 1e-4 * alpha) || rt.norm() < 1e-13) {
                q = trial;
                r = rt;
                advanced = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!advanced) break;
    }
    const bool bad_residual = !ok && r.lpNorm<Eigen::Infinity>() >= 1e-10;
    const bool bad_branch = q[1] < -1e-9 || q[3] > 1e-9;
    if (bad_residual || bad_branch) {
        if (q_guess) {
            // retry once from the geometric guess before giving up
            return solve_boundary_state(m, sole_x, com_x, com_xd, com_h, nullptr);
        }
        std::ostringstream msg;
        if (bad_residual)
            msg << "boundary solve failed: sole_x=" << sole_x << " com=("
                << com_x << ", " << com_h << ") residual=" << r.transpose();
        else
            msg << "boundary solve landed on a knee-reversed branch: q2="
                << q[1] << " q4=" << q[3];
        throw std::runtime_error(msg.str());
    }

    BoundaryState out;
    out.q = q;

    // rates: sole still, CoM drifting horizontally, posture frozen
    const Kinematics k = kinematics(m, q, Vec6::Zero());
    const Eigen::Matrix4d Jv = contract_jacobian(m, k).leftCols<4>();
    Eigen::Vector4d rhs;
    rhs << 0.0, 0.0, com_xd, 0.0;
    out.qdot.head<4>() = Jv.fullPivLu().solve(rhs);
    out.qdot[4] = 0.0;
    out.qdot[5] = 0.0;
    return out;
}

Vec6 QuinticPlan::q(double t) const {
    return q0 + t * (qdot0 + t * (c1 + t * (c2 + t * (c3 + t * c4))));
}

Vec6 QuinticPlan::qdot(double t) const {
    return qdot0 +
           t * (2.0 * c1 + t * (3.0 * c2 + t * (4.0 * c3 + t * 5.0 * c4)));
}

Vec6 QuinticPlan::qddot(double t) const {
    return 2.0 * c1 + t * (6.0 * c2 + t * (12.0 * c3 + t * 20.0 * c4));
}

QuinticPlan assemble_plan(const Vec6& q0, const Vec6& qdot0,
                          const BoundaryState& end, double T,
                          const Vec6& c1, const Vec6& c2) {
    if (!(T > 0.0)) throw std::invalid_argument("plan duration must be positive");
    QuinticPlan p;
    p.q0 = q0;
    p.qdot0 = qdot0;
    p.c1 = c1;
    p.c2 = c2;
    p.T = T;
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    const Vec6 dq = end.q - q0 - T * qdot0 - T2 * c1 - T3 * c2;
    const Vec6 dv = end.qdot - qdot0 - 2.0 * T * c1 - 3.0 * T2 * c2;
    p.c3 = (5.0 * dq - T * dv) / T4;
    p.c4 = (T * dv - 4.0 * dq) / T5;
    return p;
}

QuinticPlan cubic_plan(const Vec6& q0, const Vec6& qdot0,
                       const BoundaryState& end, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("plan duration must be positive");
    const double T2 = T * T, T3 = T2 * T;
    const Vec6 dq = end.q - q0 - T * qdot0;
    const Vec6 dv = end.qdot - qdot0;
    QuinticPlan p;
    p.q0 = q0;
    p.qdot0 = qdot0;
    p.c1 = (3.0 * dq - T * dv) / T2;
    p.c2 = (T * dv - 2.0 * dq) / T3;
    p.T = T;
    return p;
}

QuinticPlan min_jerk_plan(const Vec6& q0, const Vec6& qdot0,
                          const BoundaryState& end, double T) {
    // zero curvature at t = 0 forces c1 = 0; terminal acceleration is
    // affine in c2 with slope 2T once (c3, c4) absorb the endpoint match
    const Vec6 base =
        assemble_plan(q0, qdot0, end, T, Vec6::Zero(), Vec6::Zero()).qddot(T);
    const Vec6 c2 = -base / (2.0 * T);
    return assemble_plan(q0, qdot0, end, T, Vec6::Zero(), c2);
}

namespace {

struct EvalTerms {
    double index = 0.0;     // Simpson value of the step index
    double cop0 = 0.0;      // CoP residual at t = 0
    double copT = 0.0;      // and at t = T
    double knee_pen = 0.0;  // hinge on mid-step knee direction
    double max_defect = 0.0;
    double min_clearance = std::numeric_limits<double>::infinity();
    double knee_margin = std::numeric_limits<double>::infinity();
};

double cop_residual(const BipedModel& m, const Vec6& q, const Vec6& qdot,
                    const Vec6& qddot) {
    const Reaction r = reaction(m, q, qdot, qddot);
    // a lifting endpoint has no CoP; a large constant keeps the penalty
    // pushing such iterates away without a meaningless gradient sign
    if (r.lift_off) return 10.0;
    return r.x_cop;
}

EvalTerms evaluate_plan(const BipedModel& m, const QuinticPlan& plan,
                        const BoundaryState& end, double omega,
                        const PlannerConfig& cfg) {
    EvalTerms out;
    const int n = cfg.nodes;
    const double dt = plan.T / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        const Vec6 q = plan.q(t);
        const Vec6 qd = plan.qdot(t);
        const Vec6 qdd = plan.qddot(t);
        const Kinematics k = kinematics(m, q, qd);
        const Vec2 a_com = com_acceleration(m, k, qdd);
        const double defect = a_com.x() - omega * omega * k.com.x();
        const double ys = k.sole.y();
        const double ysd = swing_profile(t, plan.T, cfg.apex);
        double val = defect * defect + cfg.rho * (ys - ysd) * (ys - ysd);
        if (ys < 0.0) val += cfg.clearance_weight * ys * ys;
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * val;
        out.max_defect = std::max(out.max_defect, std::fabs(defect));
        if (i > 0 && i < n - 1) out.min_clearance = std::min(out.min_clearance, ys);
    }
    out.index = acc * dt / 3.0;

    out.cop0 = cop_residual(m, plan.q0, plan.qdot0, plan.qddot(0.0));
    out.copT = cop_residual(m, end.q, end.qdot, plan.qddot(plan.T));

    const Vec6 qh = plan.q(0.5 * plan.T);
    const double q2h = qh[1], q4h = qh[3];
    if (q2h < 0.0) out.knee_pen += cfg.knee_weight * q2h * q2h;
    if (q4h > 0.0) out.knee_pen += cfg.knee_weight * q4h * q4h;
    out.knee_margin = std::min({q2h, -q4h, end.q[1], -end.q[3]});
    return out;
}

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

} // namespace

QuinticPlan plan_step(const BipedModel& m, const Vec6& q0, const Vec6& qdot0,
                      double L, double T, double omega, double com_h,
                      const PlannerConfig& cfg, PlanDiagnostics* diag) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("plan_step: step duration must be positive");
    if (!(omega > 0.0) || !(com_h > 0.0))
        throw std::invalid_argument("plan_step: omega and com height must be positive");
    if (cfg.nodes < 3 || cfg.nodes % 2 == 0)
        throw std::invalid_argument("plan_step: nodes must be odd and >= 3");

    const Eigen::Vector4d s0 = com_state(m, q0, qdot0);
    const StepState lip_end = flow({s0[0], s0[1]}, T, omega);
    const BoundaryState end =
        solve_boundary_state(m, L, lip_end.x, lip_end.xd, com_h);

    const QuinticPlan start = cubic_plan(q0, qdot0, end, T);
    Vec12 z;
    z.head<6>() = start.c1;
    z.tail<6>() = start.c2;

    double lam0 = 0.0, lamT = 0.0;
    double pen = 1e3;

    auto to_plan = [&](const Vec12& zz) {
        return assemble_plan(q0, qdot0, end, T, zz.head<6>(), zz.tail<6>());
    };
    auto penalized = [&](const Vec12& zz) {
        const EvalTerms e = evaluate_plan(m, to_plan(zz), end, omega, cfg);
        return e.index + e.knee_pen + lam0 * e.cop0 + lamT * e.copT +
               0.5 * pen * (e.cop0 * e.cop0 + e.copT * e.copT);
    };
    auto gradient = [&](const Vec12& zz) {
        Vec12 g;
        for (int i = 0; i < 12; ++i) {
            const double h = 1e-6 * std::max(1.0, std::fabs(zz[i]));
            Vec12 zp = zz, zm = zz;
            zp[i] += h;
            zm[i] -= h;
            g[i] = (penalized(zp) - penalized(zm)) / (2.0 * h);
        }
        return g;
    };

    int total_inner = 0;
    int outer_used = 0;
    double viol_prev = std::numeric_limits<double>::infinity();
    bool feasible = false;

    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        outer_used = outer + 1;
        Mat12 H = Mat12::Identity();
        bool scaled = false;
        double f = penalized(z);
        Vec12 g = gradient(z);
        for (int it = 0; it < cfg.max_inner; ++it) {
            if (g.lpNorm<Eigen::Infinity>() <=
                cfg.grad_tol * std::max(1.0, std::fabs(f)))
                break;
            Vec12 d = -(H * g);
            double gd = g.dot(d);
            if (!(gd < 0.0)) {
                H.setIdentity();
                scaled = false;
                d = -g;
                gd = g.dot(d);
            }
            double alpha = 1.0;
            bool moved = false;
            double f_new = f;
            while (alpha > 1e-14) {
                f_new = penalized(z + alpha * d);
                if (f_new <= f + 1e-4 * alpha * gd) {
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++total_inner;
            if (!moved) break;
            const Vec12 z_new = z + alpha * d;
            const Vec12 g_new = gradient(z_new);
            const Vec12 s = z_new - z;
            const Vec12 y = g_new - g;
            const double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
                if (!scaled) {
                    H *= sy / y.squaredNorm();
                    scaled = true;
                }
                const Vec12 Hy = H * y;
                H += ((sy + y.dot(Hy)) / (sy * sy)) * (s * s.transpose());
                const Mat12 cross = (Hy * s.transpose()) / sy;
                H -= cross + cross.transpose();
            }
            z = z_new;
            f = f_new;
            g = g_new;
        }

        const EvalTerms e = evaluate_plan(m, to_plan(z), end, omega, cfg);
        const double viol = std::max(std::fabs(e.cop0), std::fabs(e.copT));
        if (viol < cfg.cop_tol) {
            feasible = true;
            break;
        }
        lam0 += pen * e.cop0;
        lamT += pen * e.copT;
        if (viol > 0.25 * viol_prev) pen = std::min(pen * 10.0, 1e9);
        viol_prev = viol;
    }

    const QuinticPlan plan = to_plan(z);
    if (diag) {
        const EvalTerms e = evaluate_plan(m, plan, end, omega, cfg);
        diag->objective = e.index;
        diag->cop0 = e.cop0;
        diag->copT = e.copT;
        diag->max_defect = e.max_defect;
        diag->knee_margin = e.knee_margin;
        diag->min_clearance = e.min_clearance;
        diag->outer_iters = outer_used;
        diag->inner_iters = total_inner;
        diag->converged = feasible;
    }
    return plan;
}

double lip_defect(const BipedModel& m, const QuinticPlan& plan, double omega,
                  int nodes) {
    if (nodes < 2) throw std::invalid_argument("lip_defect: nodes must be >= 2");
    double worst = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double t = plan.T * i / (nodes - 1);
        const Vec6 q = plan.q(t);
        const Vec6 qd = plan.qdot(t);
        const Kinematics k = kinematics(m, q, qd);
        const Vec2 a = com_acceleration(m, k, plan.qddot(t));
        worst = std::max(worst, std::fabs(a.x() - omega * omega * k.com.x()));
    }
    return worst;
}

} // namespace slipstep::biped
