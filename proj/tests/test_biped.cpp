#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "doctest.h"
#include "oracles.hpp"
#include "slipstep/biped/dynamics.hpp"
#include "slipstep/biped/kinematics.hpp"
#include "slipstep/biped/model.hpp"
#include "slipstep/biped/planner.hpp"
#include "slipstep/biped/rollout.hpp"
#include "slipstep/lip.hpp"

using namespace slipstep;
using namespace slipstep::biped;
namespace fs = std::filesystem;

namespace {

const double kPi = 3.14159265358979323846;

BipedModel test_model() {
    static const BipedModel m =
        load_model(std::string(SLIPSTEP_CONFIG_DIR) + "/nao_like.model");
    return m;
}

// postures around the walking range, knees on their working side
Vec6 random_pose(oracle::Rng& rng) {
    Vec6 q;
    q << rng.uniform(1.2, 1.9), rng.uniform(0.0, 1.0), rng.uniform(-2.2, -1.0),
        rng.uniform(-1.0, 0.0), rng.uniform(-0.4, 0.4), rng.uniform(1.2, 1.9);
    return q;
}

Vec6 random_rates(oracle::Rng& rng, double amp) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = rng.uniform(-amp, amp);
    return v;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// the low-friction walking scenario every rollout test starts from
BipedScenario base_scenario(int n_steps) {
    BipedScenario sc;
    sc.model = test_model();
    sc.mu = 0.15;
    sc.L_star = 0.05;
    sc.T_star = 0.6;
    sc.com_h = 0.22;
    sc.n_steps = n_steps;
    return sc;
}

} // namespace

TEST_CASE("model file loads with the documented totals") {
    const BipedModel m = test_model();
    CHECK(m.total_mass() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(m.leg_length() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.g == 9.8);
    CHECK(m.ankle_height == 0.045);
    CHECK(m.sole_fore == 0.02);
    CHECK(m.sole_aft == 0.02);
    CHECK(m.torso.mass == 2.9);
    CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("built-in parameter set equals the shipped model file") {
    const BipedModel a = reference_model();
    const BipedModel b = test_model();
    CHECK(a.g == b.g);
    CHECK(a.ankle_height == b.ankle_height);
    CHECK(a.sole_fore == b.sole_fore);
    CHECK(a.sole_aft == b.sole_aft);
    for (auto [la, lb] : {std::pair{&a.shank, &b.shank},
                          std::pair{&a.thigh, &b.thigh},
                          std::pair{&a.torso, &b.torso}}) {
        CHECK(la->mass == lb->mass);
        CHECK(la->length == lb->length);
        CHECK(la->com == lb->com);
        CHECK(la->inertia == lb->inertia);
    }
    CHECK(a.foot_mass == b.foot_mass);
    CHECK(a.foot_com_drop == b.foot_com_drop);
    CHECK(a.foot_inertia == b.foot_inertia);
}

TEST_CASE("model parsing rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_model(in);
    };
    const std::string good =
        "g = 9.8\nankle_height = 0.045\nsole_fore = 0.02\nsole_aft = 0.02\n"
        "shank_mass = 0.35\nshank_length = 0.1\nshank_com = 0.05\n"
        "shank_inertia = 2.92e-4\n"
        "thigh_mass = 0.45\nthigh_length = 0.1\nthigh_com = 0.05\n"
        "thigh_inertia = 3.75e-4\n"
        "torso_mass = 2.9\ntorso_length = 0.2\ntorso_com = 0.1\n"
        "torso_inertia = 9.67e-3\n"
        "foot_mass = 0.25\nfoot_com_drop = 0.025\nfoot_inertia = 3.3e-5\n";
    CHECK_NOTHROW(parse(good));
    CHECK_THROWS_WITH(parse(good + "warp = 1\n"),
                      doctest::Contains("unknown key 'warp'"));
    CHECK_THROWS_WITH(parse(good + "g = 9.8\n"),
                      doctest::Contains("duplicate key 'g'"));
    CHECK_THROWS_WITH(parse("g 9.8\n"), doctest::Contains("line 1"));
    CHECK_THROWS_WITH(parse("torso_mass = heavy\n"),
                      doctest::Contains("bad numeric value 'heavy'"));
    // missing key: drop the last line
    const std::string missing = good.substr(0, good.rfind("foot_inertia"));
    CHECK_THROWS_WITH(parse(missing), doctest::Contains("missing key"));
    // a physically inconsistent file fails validation
    std::string negative = good;
    negative.replace(negative.find("shank_mass = 0.35"), 17,
                     "shank_mass = -0.3");
    CHECK_THROWS_WITH(parse(negative),
                      doctest::Contains("shank must be positive"));
}

TEST_CASE("joint angles map to absolute link angles and back") {
    oracle::Rng rng(101);
    const Mat6 E = joint_to_abs();
    const Mat6 D = abs_to_joint();
    CHECK((E * D - Mat6::Identity()).norm() == doctest::Approx(0.0));
    for (int i = 0; i < 50; ++i) {
        const Vec6 q = random_rates(rng, 3.0);
        const Vec6 th = E * q;
        CHECK(th[0] == doctest::Approx(q[0]));
        CHECK(th[1] == doctest::Approx(q[0] + q[1]));
        CHECK(th[2] == doctest::Approx(q[2]));
        CHECK(th[3] == doctest::Approx(q[2] + q[3]));
        CHECK(th[4] == doctest::Approx(q[4]));
        CHECK(th[5] == doctest::Approx(q[5]));
    }
}

TEST_CASE("straight reference posture lands on the drawn geometry") {
    const BipedModel m = test_model();
    Vec6 q;
    q << kPi / 2, 0.0, -kPi / 2, 0.0, 0.0, kPi / 2;
    const Kinematics k = kinematics(m, q, Vec6::Zero());
    // hip straight above the ankle, swing leg folded back onto the stance leg
    CHECK(k.hip.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.hip.y() ==
          doctest::Approx(m.ankle_height + m.leg_length()).epsilon(1e-14));
    CHECK(k.ankle_swing.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.ankle_swing.y() == doctest::Approx(m.ankle_height).epsilon(1e-14));
    CHECK(k.sole.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.sole.y() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.com.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.torso_mid.y() ==
          doctest::Approx(k.hip.y() + 0.5 * m.torso.length).epsilon(1e-14));
}

TEST_CASE("kinematic Jacobians match central differences") {
    const BipedModel m = test_model();
    oracle::Rng rng(102);
    const Mat6 E = joint_to_abs();
    const Mat6 D = abs_to_joint();
    const double d = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec6 q = random_pose(rng);
        const Vec6 qd = random_rates(rng, 2.0);
        const Kinematics k = kinematics(m, q, qd);
        const Vec6 th = E * q;

        for (int col = 0; col < 6; ++col) {
            Vec6 tp = th, tm = th;
            tp[col] += d;
            tm[col] -= d;
            const Kinematics kp = kinematics(m, D * tp, Vec6::Zero());
            const Kinematics km = kinematics(m, D * tm, Vec6::Zero());
            for (int b = 0; b < 6; ++b) {
                const Vec2 fd = (kp.pos[b] - km.pos[b]) / (2.0 * d);
                CHECK((k.J[b].col(col) - fd).norm() < 1e-8);
            }
            const Vec2 fd_sole = (kp.sole - km.sole) / (2.0 * d);
            CHECK((k.J_sole.col(col) - fd_sole).norm() < 1e-8);
            const Vec2 fd_mid = (kp.torso_mid - km.torso_mid) / (2.0 * d);
            CHECK((k.J_torso_mid.col(col) - fd_mid).norm() < 1e-8);
        }

        // Jdot: difference J along the motion
        const double dt = 1e-6;
        const Kinematics kp = kinematics(m, q + dt * qd, Vec6::Zero());
        const Kinematics km = kinematics(m, q - dt * qd, Vec6::Zero());
        for (int b = 0; b < 6; ++b) {
            const Mat26 fd = (kp.J[b] - km.J[b]) / (2.0 * dt);
            CHECK((k.Jdot[b] - fd).norm() < 1e-6);
        }
        CHECK((k.Jdot_sole - (kp.J_sole - km.J_sole) / (2.0 * dt)).norm() < 1e-6);

        // CoM velocity consistent with the position map
        const Vec2 com_fd = (kp.com - km.com) / (2.0 * dt);
        CHECK((k.com_vel - com_fd).norm() < 1e-6);

        // com_state agrees with the assembled kinematics
        const Eigen::Vector4d cs = com_state(m, q, qd);
        CHECK(cs[0] == doctest::Approx(k.com.x()).epsilon(1e-12));
        CHECK(cs[2] == doctest::Approx(k.com.y()).epsilon(1e-12));
        CHECK(cs[1] == doctest::Approx(k.com_vel.x()).epsilon(1e-12));
        CHECK(cs[3] == doctest::Approx(k.com_vel.y()).epsilon(1e-12));
    }
}

TEST_CASE("support exchange preserves every body state") {
    const BipedModel m = test_model();
    oracle::Rng rng(103);
    for (int trial = 0; trial < 40; ++trial) {
        // a touchdown-like state: swing sole flat on the ground, still or not
        const double cx = rng.uniform(-0.03, 0.035);
        const double L = cx + rng.uniform(-0.05, 0.05);
        const double cxd = rng.uniform(-0.3, 0.3);
        const BoundaryState b = solve_boundary_state(m, L, cx, cxd, 0.22);
        const Kinematics before = kinematics(m, b.q, b.qdot);

        Vec6 q2, qd2;
        exchange_support(b.q, b.qdot, q2, qd2);
        const Kinematics after = kinematics(m, q2, qd2);

        // body reindex under the swap: stance<->swing legs, foot roles flip
        const Vec2 shift{L, 0.0};
        const int map[6] = {3, 2, 1, 0, -1, 5};
        for (int nb = 0; nb < 6; ++nb) {
            if (map[nb] < 0) continue;  // new swing foot handled below
            const Vec2 want = before.pos[map[nb]] - shift;
            CHECK((after.pos[nb] - want).norm() < 1e-9);
            const Vec2 vb = before.J[map[nb]] * before.theta_dot;
            const Vec2 va = after.J[nb] * after.theta_dot;
            CHECK((va - vb).norm() < 1e-9);
        }
        // the old stance foot becomes the motionless swing foot
        const Vec2 old_foot{-L, m.ankle_height - m.foot_com_drop};
        CHECK((after.pos[4] - old_foot).norm() < 1e-9);
        CHECK((after.J[4] * after.theta_dot).norm() < 1e-9);

        CHECK((after.com - (before.com - shift)).norm() < 1e-9);
        CHECK((after.com_vel - before.com_vel).norm() < 1e-9);

        // exchanging twice restores the original coordinates
        Vec6 q3, qd3;
        exchange_support(q2, qd2, q3, qd3);
        CHECK((q3 - b.q).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK((qd3 - b.qdot).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("mass matrix is symmetric positive definite across poses") {
    const BipedModel m = test_model();
    oracle::Rng rng(104);
    double min_eig = 1e9;
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec6 q = random_pose(rng);
        const Mat6 M = mass_matrix(m, q);
        CHECK((M - M.transpose()).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Mat6> es(M);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // kinetic energy through M equals the body-by-body sum
        const Vec6 qd = random_rates(rng, 2.0);
        const double ke_m = 0.5 * qd.dot(M * qd);
        const double ke_sum = total_energy(m, q, qd) - total_energy(m, q, Vec6::Zero());
        CHECK(ke_m == doctest::Approx(ke_sum).epsilon(1e-10));
    }
    CHECK(min_eig > 1e-6);
}

TEST_CASE("gravity bias is the gradient of the potential") {
    const BipedModel m = test_model();
    oracle::Rng rng(105);
    const double d = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec6 q = random_pose(rng);
        const Vec6 bias = bias_forces(m, q, Vec6::Zero());
        for (int i = 0; i < 6; ++i) {
            Vec6 qp = q, qm = q;
            qp[i] += d;
            qm[i] -= d;
            const double fd = (total_energy(m, qp, Vec6::Zero()) -
                               total_energy(m, qm, Vec6::Zero())) /
                              (2.0 * d);
            CHECK(bias[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("gravity-balancing torques hold the robot still") {
    const BipedModel m = test_model();
    oracle::Rng rng(106);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec6 q = random_pose(rng);
        const Vec6 tau = inverse_dynamics(m, q, Vec6::Zero(), Vec6::Zero());
        const Vec6 qdd = forward_dynamics(m, q, Vec6::Zero(), tau);
        CHECK(qdd.lpNorm<Eigen::Infinity>() < 1e-9);
    }
}

TEST_CASE("energy rate equals applied torque power in a driven rollout") {
    const BipedModel m = test_model();
    Vec6 q, qd, tau;
    q << 1.4, 0.5, -1.7, -0.5, 0.1, 1.5;
    qd << 0.3, -0.2, 0.4, 0.1, -0.3, 0.2;
    tau << 0.05, -0.04, 0.03, -0.02, 0.01, 0.02;

    const double dt = 1e-4;
    const int n = 2000;  // 0.2 s
    double power_integral = 0.0;  // trapezoid on the sampled power
    const double e0 = total_energy(m, q, qd);
    double prev_power = tau.dot(qd);
    for (int i = 0; i < n; ++i) {
        auto acc = [&](const Vec6& qq, const Vec6& vv) {
            return forward_dynamics(m, qq, vv, tau);
        };
        const Vec6 a1 = acc(q, qd);
        const Vec6 q2 = q + 0.5 * dt * qd, v2 = qd + 0.5 * dt * a1;
        const Vec6 a2 = acc(q2, v2);
        const Vec6 q3 = q + 0.5 * dt * v2, v3 = qd + 0.5 * dt * a2;
        const Vec6 a3 = acc(q3, v3);
        const Vec6 q4 = q + dt * v3, v4 = qd + dt * a3;
        const Vec6 a4 = acc(q4, v4);
        q += (dt / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4);
        qd += (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        const double power = tau.dot(qd);
        power_integral += 0.5 * dt * (prev_power + power);
        prev_power = power;
    }
    const double de = total_energy(m, q, qd) - e0;
    CHECK(de == doctest::Approx(power_integral)
                    .epsilon(1e-6));  // conservative dynamics bookkeeping
}

TEST_CASE("ground reaction matches independent momentum-rate estimates") {
    const BipedModel m = test_model();

    SUBCASE("statics: CoP under the CoM, no shear") {
        oracle::Rng rng(107);
        for (int trial = 0; trial < 30; ++trial) {
            const Vec6 q = random_pose(rng);
            const Reaction r = reaction(m, q, Vec6::Zero(), Vec6::Zero());
            const Kinematics k = kinematics(m, q, Vec6::Zero());
            CHECK(!r.lift_off);
            CHECK(r.fx == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(r.fy == doctest::Approx(m.total_mass() * m.g).epsilon(1e-12));
            CHECK(r.x_cop == doctest::Approx(k.com.x()).epsilon(1e-10));
            CHECK(r.mu_r == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("dynamics: forces and CoP from differentiated momenta") {
        // free fall under constant torque; compare the reported reaction
        // against finite differences of linear/angular momentum
        Vec6 q, qd, tau;
        q << 1.35, 0.55, -1.75, -0.45, 0.05, 1.52;
        qd << 0.25, -0.15, 0.35, 0.2, -0.1, 0.15;
        tau << 0.02, -0.03, 0.01, -0.02, 0.005, 0.01;

        double mass[6], inertia[6];
        body_params(m, mass, inertia);
        auto momenta = [&](const Vec6& qq, const Vec6& vv) {
            const Kinematics k = kinematics(m, qq, vv);
            Eigen::Vector3d out = Eigen::Vector3d::Zero();  // px, py, H_origin
            for (int b = 0; b < 6; ++b) {
                const Vec2 v = k.J[b] * k.theta_dot;
                out[0] += mass[b] * v.x();
                out[1] += mass[b] * v.y();
                out[2] += mass[b] * (k.pos[b].x() * v.y() - k.pos[b].y() * v.x()) +
                          inertia[b] * k.theta_dot[b];
            }
            return out;
        };
        auto gravity_moment = [&](const Vec6& qq) {
            const Kinematics k = kinematics(m, qq, Vec6::Zero());
            double sum = 0.0;
            for (int b = 0; b < 6; ++b) sum += mass[b] * k.pos[b].x();
            return sum;  // static stance foot sits at x = 0
        };

        const double d = 1e-5;
        auto advance = [&](Vec6 qq, Vec6 vv, double t) {
            const int n = 64;
            const double h = t / n;
            for (int i = 0; i < n; ++i) {
                auto acc = [&](const Vec6& a, const Vec6& b) {
                    return forward_dynamics(m, a, b, tau);
                };
                const Vec6 a1 = acc(qq, vv);
                const Vec6 p2 = qq + 0.5 * h * vv, w2 = vv + 0.5 * h * a1;
                const Vec6 a2 = acc(p2, w2);
                const Vec6 p3 = qq + 0.5 * h * w2, w3 = vv + 0.5 * h * a2;
                const Vec6 a3 = acc(p3, w3);
                const Vec6 p4 = qq + h * w3, w4 = vv + h * a3;
                const Vec6 a4 = acc(p4, w4);
                qq += (h / 6.0) * (vv + 2.0 * w2 + 2.0 * w3 + w4);
                vv += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            }
            return std::make_pair(qq, vv);
        };
        const auto [qp, vp] = advance(q, qd, d);
        const auto [qm, vm] = advance(q, qd, -d);
        const Eigen::Vector3d mdot = (momenta(qp, vp) - momenta(qm, vm)) / (2.0 * d);

        const Vec6 qdd = forward_dynamics(m, q, qd, tau);
        const Reaction r = reaction(m, q, qd, qdd);
        // Newton: reaction balances momentum rate plus total weight
        CHECK(r.fx == doctest::Approx(mdot[0]).epsilon(1e-6));
        CHECK(r.fy == doctest::Approx(mdot[1] + m.total_mass() * m.g).epsilon(1e-6));
        // moment balance about the origin gives the CoP
        const double cop = (mdot[2] + m.g * gravity_moment(q)) / r.fy;
        CHECK(r.x_cop == doctest::Approx(cop).epsilon(1e-6));
        CHECK(r.mu_r == doctest::Approx(std::fabs(r.fx) / r.fy).epsilon(1e-12));
    }

    SUBCASE("dropping the CoM faster than gravity unloads the foot") {
        Vec6 q;
        q << 1.4, 0.5, -1.7, -0.5, 0.0, 1.5;
        const Kinematics k = kinematics(m, q, Vec6::Zero());
        double mass[6], inertia[6];
        body_params(m, mass, inertia);
        Mat26 Jc = Mat26::Zero();  // CoM Jacobian in joint coordinates
        for (int b = 0; b < 6; ++b) Jc += (mass[b] / m.total_mass()) * k.J[b];
        const Eigen::Matrix<double, 1, 6> Jy = (Jc * joint_to_abs()).row(1);
        const Vec6 qdd = -Jy.transpose() * (3.0 * m.g / Jy.squaredNorm());
        // sanity: this really commands com ydd = -3g
        CHECK(com_acceleration(m, k, qdd).y() ==
              doctest::Approx(-3.0 * m.g).epsilon(1e-9));
        const Reaction r = reaction(m, q, Vec6::Zero(), qdd);
        CHECK(r.lift_off);
    }
}

TEST_CASE("torso impulse maps to joint rates like the constrained oracle") {
    const BipedModel m = test_model();
    oracle::Rng rng(108);

    SUBCASE("zero impulse is the identity") {
        const Vec6 q = random_pose(rng);
        const Vec6 qd = random_rates(rng, 1.5);
        CHECK((impact(m, q, qd, 0.0) - qd).lpNorm<Eigen::Infinity>() == 0.0);
    }

    SUBCASE("pinned solve equals the floating KKT solve; momentum adds up") {
        double worst_eq = 0.0, worst_book = 0.0;
        for (int trial = 0; trial < 300; ++trial) {
            const Vec6 q = random_pose(rng);
            const Vec6 qd = random_rates(rng, 1.5);
            const double F = rng.uniform(-0.6, 0.6);
            const Vec6 plus = impact(m, q, qd, F);
            const ImpactResult kk = impact_with_ground_impulse(m, q, qd, F);
            worst_eq = std::max(
                worst_eq, (plus - kk.qdot_plus).lpNorm<Eigen::Infinity>());

            // whole-robot momentum change = applied impulse + pin impulse
            const Eigen::Vector4d b = com_state(m, q, qd);
            const Eigen::Vector4d a = com_state(m, q, plus);
            const Vec2 dp = m.total_mass() * Vec2(a[1] - b[1], a[3] - b[3]);
            const Vec2 want = Vec2(F, 0.0) + kk.ground_impulse;
            worst_book =
                std::max(worst_book, (dp - want).norm() / std::max(1.0, std::fabs(F)));
        }
        CHECK(worst_eq < 1e-9);
        CHECK(worst_book < 1e-9);
    }

    SUBCASE("walking-posture push accelerates the CoM by about F/m") {
        const double omega = std::sqrt(9.8 / 0.22);
        const StepState fp = fixed_point(0.05, 0.6, omega);
        const BoundaryState b = solve_boundary_state(m, -0.05, fp.x, fp.xd, 0.22);
        const double F = 0.3;
        const ImpactResult kk = impact_with_ground_impulse(m, b.q, b.qdot, F);
        const Eigen::Vector4d before = com_state(m, b.q, b.qdot);
        const Eigen::Vector4d after = com_state(m, b.q, kk.qdot_plus);
        const double dxd = after[1] - before[1];
        // the pin absorbs a small share; the identity above accounts for it
        CHECK(dxd == doctest::Approx(F / m.total_mass()).epsilon(0.05));
        CHECK(std::fabs(dxd - F / m.total_mass()) <=
              kk.ground_impulse.norm() / m.total_mass() + 1e-12);
        CHECK(kk.ground_impulse.norm() < 0.5 * F);
    }
}

TEST_CASE("boundary solve places sole, CoM and rates exactly") {
    const BipedModel m = test_model();
    oracle::Rng rng(109);
    for (int trial = 0; trial < 60; ++trial) {
        // the swing target stays within leg reach of the CoM it must straddle
        const double cx = rng.uniform(-0.035, 0.04);
        const double L = cx + rng.uniform(-0.06, 0.06);
        const double cxd = rng.uniform(-0.4, 0.4);
        const BoundaryState b = solve_boundary_state(m, L, cx, cxd, 0.22);

        const Kinematics k = kinematics(m, b.q, b.qdot);
        CHECK(std::fabs(k.sole.x() - L) < 1e-9);
        CHECK(std::fabs(k.sole.y()) < 1e-9);
        CHECK(std::fabs(k.com.x() - cx) < 1e-9);
        CHECK(std::fabs(k.com.y() - 0.22) < 1e-9);
        CHECK(b.q[4] == 0.0);
        CHECK(b.q[5] == doctest::Approx(kPi / 2));
        CHECK(b.q[1] >= 0.0);  // knee limits respected at the boundary
        CHECK(b.q[3] <= 0.0);

        CHECK((k.J_sole * k.theta_dot).norm() < 1e-9);
        CHECK(k.com_vel.x() == doctest::Approx(cxd).epsilon(1e-9));
        CHECK(std::fabs(k.com_vel.y()) < 1e-9);
        CHECK(b.qdot[4] == 0.0);
        CHECK(b.qdot[5] == 0.0);
    }

    // far out of reach: the solver reports failure instead of nonsense
    CHECK_THROWS_AS(solve_boundary_state(m, 0.6, -0.025, 0.17, 0.22),
                    std::runtime_error);
}

TEST_CASE("quintic construction honours its boundary contract") {
    const BipedModel m = test_model();
    oracle::Rng rng(110);
    const BoundaryState b0 = solve_boundary_state(m, -0.05, -0.025, 0.17, 0.22);
    const BoundaryState bT = solve_boundary_state(m, 0.05, 0.025, 0.17, 0.22);
    const double T = 0.6;

    for (int trial = 0; trial < 30; ++trial) {
        const Vec6 c1 = random_rates(rng, 5.0);
        const Vec6 c2 = random_rates(rng, 20.0);
        const QuinticPlan p = assemble_plan(b0.q, b0.qdot, bT, T, c1, c2);
        CHECK((p.q(0.0) - b0.q).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((p.qdot(0.0) - b0.qdot).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((p.q(T) - bT.q).lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK((p.qdot(T) - bT.qdot).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((p.qddot(0.0) - 2.0 * c1).lpNorm<Eigen::Infinity>() == 0.0);
    }

    const QuinticPlan cub = cubic_plan(b0.q, b0.qdot, bT, T);
    CHECK(cub.c3.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(cub.c4.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((cub.q(T) - bT.q).lpNorm<Eigen::Infinity>() < 1e-12);

    const QuinticPlan mj = min_jerk_plan(b0.q, b0.qdot, bT, T);
    CHECK(mj.qddot(0.0).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(mj.qddot(T).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((mj.q(T) - bT.q).lpNorm<Eigen::Infinity>() < 1e-10);

    CHECK_THROWS_AS(assemble_plan(b0.q, b0.qdot, bT, 0.0, Vec6::Zero(), Vec6::Zero()),
                    std::invalid_argument);
}

TEST_CASE("swing profile is a symmetric bump") {
    CHECK(swing_profile(0.0, 0.6, 0.02) == doctest::Approx(0.0));
    CHECK(swing_profile(0.6, 0.6, 0.02) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(swing_profile(0.3, 0.6, 0.02) == doctest::Approx(0.02));
    CHECK(swing_profile(0.15, 0.6, 0.02) ==
          doctest::Approx(swing_profile(0.45, 0.6, 0.02)));
}

TEST_CASE("planned step meets the touchdown contract") {
    const BipedModel m = test_model();
    const double omega = std::sqrt(9.8 / 0.22);
    const StepState fp = fixed_point(0.05, 0.6, omega);
    const BoundaryState b0 = solve_boundary_state(m, -0.05, fp.x, fp.xd, 0.22);

    PlannerConfig cfg;
    PlanDiagnostics pd;
    const QuinticPlan plan =
        plan_step(m, b0.q, b0.qdot, 0.05, 0.6, omega, 0.22, cfg, &pd);

    // starts from the measured state exactly
    CHECK((plan.q(0.0) - b0.q).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((plan.qdot(0.0) - b0.qdot).lpNorm<Eigen::Infinity>() == 0.0);

    // touchdown: sole at (L, 0) at rest, flat, torso upright
    const Vec6 qT = plan.q(plan.T);
    const Vec6 qdT = plan.qdot(plan.T);
    const Kinematics kT = kinematics(m, qT, qdT);
    CHECK(std::fabs(kT.sole.x() - 0.05) < 1e-9);
    CHECK(std::fabs(kT.sole.y()) < 1e-9);
    CHECK((kT.J_sole * kT.theta_dot).norm() < 1e-6);  // lands without bouncing
    CHECK(qT[4] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(qdT[4] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(qT[5] == doctest::Approx(kPi / 2));
    CHECK(std::fabs(qdT[5]) < 1e-12);

    // CoM endpoint rides the pendulum flow
    const StepState want = flow(fp, 0.6, omega);
    const Eigen::Vector4d csT = com_state(m, qT, qdT);
    CHECK(csT[0] == doctest::Approx(want.x).epsilon(1e-8));
    CHECK(csT[1] == doctest::Approx(want.xd).epsilon(1e-8));
    CHECK(csT[2] == doctest::Approx(0.22).epsilon(1e-8));
    CHECK(std::fabs(csT[3]) < 1e-8);

    // optimizer-enforced conditions
    CHECK(pd.converged);
    CHECK(std::fabs(pd.cop0) < 1e-6);
    CHECK(std::fabs(pd.copT) < 1e-6);
    CHECK(pd.knee_margin >= 0.0);
    CHECK(pd.min_clearance > -1e-9);  // no scuffing in the plan
    CHECK(plan.q(0.3)[1] >= 0.0);
    CHECK(plan.q(0.3)[3] <= 0.0);

    // planner failure surfaces as an error, not a bogus plan
    CHECK_THROWS_AS(plan_step(m, b0.q, b0.qdot, 0.7, 0.6, omega, 0.22, cfg),
                    std::runtime_error);
    CHECK_THROWS_AS(plan_step(m, b0.q, b0.qdot, 0.05, -1.0, omega, 0.22, cfg),
                    std::invalid_argument);
}

TEST_CASE("optimized plan tracks the pendulum far better than minimum jerk") {
    const BipedModel m = test_model();
    const double omega = std::sqrt(9.8 / 0.22);
    // the cyclic step: both plans join the same boundary states
    const StepState fp = fixed_point(0.05, 0.6, omega);
    const BoundaryState b0 = solve_boundary_state(m, -0.05, fp.x, fp.xd, 0.22);
    const StepState end = flow(fp, 0.6, omega);
    const BoundaryState bT = solve_boundary_state(m, 0.05, end.x, end.xd, 0.22);

    PlannerConfig cfg;
    const QuinticPlan opt =
        plan_step(m, b0.q, b0.qdot, 0.05, 0.6, omega, 0.22, cfg);
    const QuinticPlan naive = min_jerk_plan(b0.q, b0.qdot, bT, 0.6);

    const double d_opt = lip_defect(m, opt, omega, 201);
    const double d_naive = lip_defect(m, naive, omega, 201);
    CHECK(d_opt * 10.0 <= d_naive);
}

TEST_CASE("computed torque tracking") {
    const BipedModel m = test_model();
    const double omega = std::sqrt(9.8 / 0.22);
    const StepState fp = fixed_point(0.05, 0.6, omega);
    const BoundaryState b0 = solve_boundary_state(m, -0.05, fp.x, fp.xd, 0.22);
    PlannerConfig cfg;
    const QuinticPlan plan =
        plan_step(m, b0.q, b0.qdot, 0.05, 0.6, omega, 0.22, cfg);

    // test-local tracking loop, mirrors the rollout control law
    auto track = [&](Vec6 q, Vec6 qd, double kp, double kd, double T,
                     double* max_err, Vec6* err_at_end) {
        const double h = 1e-3;
        const int n = int(std::lround(T / h));
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = i * h;
            auto acc = [&](double tt, const Vec6& qq, const Vec6& vv) {
                const Vec6 e = plan.q(tt) - qq;
                const Vec6 ed = plan.qdot(tt) - vv;
                const Vec6 ref = plan.qddot(tt) + kd * ed + kp * e;
                const Vec6 tau = mass_matrix(m, qq) * ref + bias_forces(m, qq, vv);
                return forward_dynamics(m, qq, vv, tau);
            };
            const Vec6 a1 = acc(t, q, qd);
            const Vec6 q2 = q + 0.5 * h * qd, v2 = qd + 0.5 * h * a1;
            const Vec6 a2 = acc(t + 0.5 * h, q2, v2);
            const Vec6 q3 = q + 0.5 * h * v2, v3 = qd + 0.5 * h * a2;
            const Vec6 a3 = acc(t + 0.5 * h, q3, v3);
            const Vec6 q4 = q + h * v3, v4 = qd + h * a3;
            const Vec6 a4 = acc(t + h, q4, v4);
            q += (h / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4);
            qd += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            worst = std::max(worst,
                             (plan.q(t + h) - q).lpNorm<Eigen::Infinity>());
        }
        if (max_err) *max_err = worst;
        if (err_at_end) *err_at_end = plan.q(T) - q;
        return q;
    };

    SUBCASE("exact start stays glued to the plan") {
        double worst = 0.0;
        track(b0.q, b0.qdot, 400.0, 40.0, 0.6, &worst, nullptr);
        CHECK(worst < 1e-9);
    }

    SUBCASE("initial error decays along the critically damped closed form") {
        // per-joint error dynamics edd = -kd ed - kp e, kd^2 = 4 kp
        const double e0 = 1e-3;
        Vec6 q = b0.q;
        q[2] += e0;
        Vec6 end_err;
        track(q, b0.qdot, 400.0, 40.0, 0.3, nullptr, &end_err);
        const double lam = 20.0;  // double root of s^2 + 40 s + 400
        const double want = -e0 * (1.0 + lam * 0.3) * std::exp(-lam * 0.3);
        CHECK(end_err[2] == doctest::Approx(want).epsilon(1e-6));
        CHECK(std::fabs(end_err[2]) < 0.02 * e0);
    }

    SUBCASE("zero gains never correct the error") {
        const double e0 = 1e-3;
        Vec6 q = b0.q;
        q[2] += e0;
        Vec6 end_err;
        track(q, b0.qdot, 0.0, 0.0, 0.3, nullptr, &end_err);
        CHECK(std::fabs(end_err[2]) >= 0.99 * e0);  // no decay without feedback
    }
}

TEST_CASE("nominal ten-step walk meets the feasibility bullets") {
    BipedScenario sc = base_scenario(10);
    std::ostringstream log;
    const RolloutResult rr = run_full_scenario(sc, &log);

    REQUIRE(rr.outcome == "completed");
    REQUIRE(rr.steps_completed == 10);
    for (const StepRecord& s : rr.steps) {
        CHECK(s.mode == StepMode::nominal);
        CHECK(s.T == 0.6);
        CHECK(s.mu_r_peak < 0.15);       // friction demand under the budget
        CHECK(s.min_fn > 0.0);           // foot never unloads
        CHECK(s.deviation < 1e-6);       // the cyclic gait reproduces itself
        CHECK(std::fabs(s.actual_L - 0.05) < 1e-6);
    }
    CHECK(rr.report.mu_r_peak < 0.15);
    CHECK(rr.report.min_fn > 0.0);
    CHECK(rr.report.cop_min > -0.02);    // CoP stays over the sole
    CHECK(rr.report.cop_max < 0.02);
    CHECK(rr.report.touchdown_speed_max < 1e-3);
    CHECK(rr.report.tracking_err_max < 1e-3);
    CHECK(rr.report.knee_margin_min >= 0.0);
    CHECK(rr.report.min_clearance > -1e-4);
    CHECK(rr.report.plan_cop_residual_max < 1e-6);

    // joint log: exact header, one row per integrator node, 22 columns
    std::istringstream rows(log.str());
    std::string line;
    REQUIRE(std::getline(rows, line));
    CHECK(line ==
          "t,q1,q2,q3,q4,q5,q6,qd1,qd2,qd3,qd4,qd5,qd6,"
          "tau1,tau2,tau3,tau4,tau5,tau6,x_cop,fn,mu_r");
    int n_rows = 0;
    int n_cols_bad = 0;
    while (std::getline(rows, line)) {
        ++n_rows;
        const long commas = std::count(line.begin(), line.end(), ',');
        if (commas != 21) ++n_cols_bad;
    }
    CHECK(n_rows == 10 * 601);
    CHECK(n_cols_bad == 0);

    // deterministic: a second run reproduces the end state bitwise
    const RolloutResult again = run_full_scenario(sc);
    CHECK((again.q_final - rr.q_final).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((again.qd_final - rr.qd_final).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(again.report.mu_r_peak == rr.report.mu_r_peak);
}

TEST_CASE("push triggers the moving-border interlude and recovery") {
    BipedScenario sc = base_scenario(14);
    sc.sup.fixed_border_enabled = false;
    sc.pushes.push_back({4, 0.3});
    const RolloutResult rr = run_full_scenario(sc);

    REQUIRE(rr.outcome == "completed");
    REQUIRE(rr.steps_completed == 14);

    // the push lands the state outside the primary region: shortened cadence
    CHECK(rr.steps[4].mode == StepMode::moving_border);
    CHECK(rr.steps[4].T < 0.6);
    CHECK(rr.steps[4].com_start.xd > 0.2);  // sped up by the impulse

    int first_restored = -1;
    for (const StepRecord& s : rr.steps) {
        if (s.index > 4 && s.mode == StepMode::nominal && first_restored < 0)
            first_restored = s.index;
        if (s.mode == StepMode::moving_border) CHECK(s.T < 0.6);
    }
    REQUIRE(first_restored > 4);
    for (const StepRecord& s : rr.steps)  // once back, stays back
        if (s.index >= first_restored) CHECK(s.mode == StepMode::nominal);

    // recovered: the desired cycle is reestablished
    CHECK(rr.steps.back().deviation < 1e-4);
    CHECK(rr.report.mu_r_peak < 0.15);  // never close to slipping
    CHECK(rr.report.min_fn > 0.0);
}

TEST_CASE("halving the integrator step leaves the endpoint unchanged") {
    BipedScenario sc = base_scenario(3);
    const RolloutResult coarse = run_full_scenario(sc);
    sc.dt = 5e-4;
    const RolloutResult fine = run_full_scenario(sc);
    REQUIRE(coarse.outcome == "completed");
    REQUIRE(fine.outcome == "completed");
    CHECK((coarse.q_final - fine.q_final).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((coarse.qd_final - fine.qd_final).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("biped scenario files parse, resolve the model and validate") {
    TempDir tmp("slipstep_biped_scenario");
    // keep a private copy of the model so relative resolution is exercised
    fs::copy_file(std::string(SLIPSTEP_CONFIG_DIR) + "/nao_like.model",
                  tmp.path / "robot.model");
    {
        std::ofstream f(tmp.path / "push.scn");
        f << "# low friction push recovery\n"
             "model = robot.model\n"
             "mu = 0.15\n"
             "L_star = 0.05\n"
             "T_star = 0.6\n"
             "com_h = 0.22\n"
             "n_steps = 14\n"
             "dt = 0.001\n"
             "kp = 400\n"
             "kd = 40\n"
             "rho = 100\n"
             "apex = 0.02\n"
             "kappa = 0.8\n"
             "fixed_border = off\n"
             "push = 4 0.3\n";
    }
    const BipedScenario sc = load_biped_scenario((tmp.path / "push.scn").string());
    CHECK(sc.model.total_mass() == doctest::Approx(5.0));
    CHECK(sc.mu == 0.15);
    CHECK(sc.L_star == 0.05);
    CHECK(sc.com_h == 0.22);
    CHECK(sc.n_steps == 14);
    CHECK(sc.planner.rho == 100.0);
    CHECK(sc.planner.apex == 0.02);
    CHECK(sc.sup.kappa == 0.8);
    CHECK_FALSE(sc.sup.fixed_border_enabled);
    REQUIRE(sc.pushes.size() == 1);
    CHECK(sc.pushes[0].at_step == 4);
    CHECK(sc.pushes[0].impulse == 0.3);

    auto parse = [&](const std::string& text) {
        std::istringstream in(text);
        return parse_biped_scenario(in, tmp.path.string());
    };
    CHECK_THROWS_WITH(parse("model = robot.model\nwhat = 1\n"),
                      doctest::Contains("unknown key 'what'"));
    CHECK_THROWS_WITH(parse("mu = 0.2\n"), doctest::Contains("missing key 'model'"));
    CHECK_THROWS_WITH(parse("model = robot.model\nmu = slippery\n"),
                      doctest::Contains("bad numeric value"));
    CHECK_THROWS_WITH(parse("model = robot.model\npush = 4\n"),
                      doctest::Contains("push needs"));
    CHECK_THROWS_WITH(parse("model = robot.model\nn_steps = 0\n"),
                      doctest::Contains("n_steps"));
    CHECK_THROWS_AS(load_biped_scenario((tmp.path / "absent.scn").string()),
                    std::invalid_argument);
}
