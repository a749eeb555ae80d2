#pragma once

// Closed-loop walking rollout on the full model.
//
// Per step: the supervisor reads the measured CoM state (after any push),
// the planner produces a joint-space quintic, a computed-torque loop tracks
// it under RK4 integration of the rigid-body dynamics, and at touchdown the
// support legs are exchanged. Ground contact is a monitored bilateral pin:
// every sample reports the friction demand, normal force and CoP, and the
// rollout aborts with a diagnostic when a monitor trips (slip, lift-off,
// swing-foot scuffing) or a solve fails. Deterministic throughout.

#include <iosfwd>
#include <string>
#include <vector>

#include "slipstep/biped/model.hpp"
#include "slipstep/biped/planner.hpp"
#include "slipstep/control.hpp"

namespace slipstep::biped {

struct BipedScenario {
    BipedModel model;
    double mu = 0.15;      // available friction
    double L_star = 0.05;  // desired gait [m]
    double T_star = 0.6;   // [s]
    double com_h = 0.22;   // pendulum height the gait is planned around [m]
    int n_steps = 10;
    double dt = 1e-3;      // integrator step [s]
    double kp = 400.0;     // tracking gains (per rad of joint error)
    double kd = 40.0;
    PlannerConfig planner;
    SupervisorOptions sup;
    struct Push {
        int at_step = 0;       // applied at that step's start, before sensing
        double impulse = 0.0;  // horizontal at the torso midpoint [kg m/s]
    };
    std::vector<Push> pushes;
};

// key = value text; '#' comments. Keys: model (path to a model file,
// resolved against base_dir unless absolute), mu, L_star, T_star, com_h,
// n_steps, dt, kp, kd, rho, apex, kappa, fixed_border (on/off), and
// repeatable push = "<step> <impulse>".
BipedScenario parse_biped_scenario(std::istream& in, const std::string& base_dir);
BipedScenario load_biped_scenario(const std::string& path);

// Single "key = value" assignment through the file-format rules; relative
// model paths resolve against base_dir.
void apply_biped_override(BipedScenario& sc, const std::string& key,
                          const std::string& value,
                          const std::string& base_dir = ".");

struct StepRecord {
    int index = 0;
    StepMode mode = StepMode::nominal;
    double L = 0.0, T = 0.0;       // commanded
    StepState com_start;           // measured at step start (post-push)
    double deviation = 0.0;        // |com_start - primary fixed point|
    double mu_r_peak = 0.0;
    double min_fn = 0.0;
    double cop_min = 0.0, cop_max = 0.0;
    double touchdown_speed = 0.0;  // swing-sole speed at T [m/s]
    double tracking_err = 0.0;     // max joint tracking error [rad]
    double plan_defect = 0.0;      // planner max |xdd - w^2 x| [m/s^2]
    double plan_cop_residual = 0.0;
    double min_clearance = 0.0;    // swing-sole height low-water mark [m]
    double actual_L = 0.0;         // landed sole position [m]
};

// Extremes over the simulated trajectory plus worst planner residuals.
struct FeasibilityReport {
    double min_fn = 0.0;
    double mu_r_peak = 0.0;
    double cop_min = 0.0, cop_max = 0.0;
    double touchdown_speed_max = 0.0;
    double tracking_err_max = 0.0;
    double plan_defect_max = 0.0;
    double plan_cop_residual_max = 0.0;
    double knee_margin_min = 0.0;
    double min_clearance = 0.0;
};

struct RolloutResult {
    // completed | slipped | lift_off | scuffed | unrecoverable | planner_failure
    std::string outcome;
    std::string detail;  // one-line diagnostic for aborted runs
    int steps_completed = 0;
    std::vector<StepRecord> steps;
    FeasibilityReport report;
    Vec6 q_final = Vec6::Zero();   // state after the last completed exchange
    Vec6 qd_final = Vec6::Zero();
};

// joint_log, when given, receives CSV rows
//   t,q1..q6,qd1..qd6,tau1..tau6,x_cop,fn,mu_r
// sampled at every integrator node.
RolloutResult run_full_scenario(const BipedScenario& sc,
                                std::ostream* joint_log = nullptr);

// Human-readable multi-line summary (outcome, extremes, per-step table).
std::string format_rollout(const RolloutResult& r);

} // namespace slipstep::biped
