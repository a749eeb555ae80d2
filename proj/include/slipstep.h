#ifndef SLIPSTEP_H
#define SLIPSTEP_H

/*
 * C interface to libslipstep, a slip-aware footstep controller for sagittal
 * point-mass walking plus a planar six-joint biped it has been validated on.
 *
 * Conventions:
 *   - Every fallible call returns slipstep_status. On failure a descriptive
 *     message is stored per thread and stays valid until the next failing
 *     call on that thread; read it with slipstep_last_error(). Out
 *     parameters are written only on SLIPSTEP_OK.
 *   - Handles are opaque. Free them with the matching _free(); NULL is a
 *     valid argument to every _free().
 *   - Strings returned by handle accessors are owned by the handle and die
 *     with it.
 */

#if defined(_WIN32)
#define SLIPSTEP_API __declspec(dllexport)
#else
#define SLIPSTEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slipstep_status {
    SLIPSTEP_OK = 0,
    SLIPSTEP_BAD_INPUT = 1,    /* malformed value, unknown key, unreadable
                                  file, refusing to overwrite */
    SLIPSTEP_PRECONDITION = 2, /* operation called outside its domain
                                  (e.g. step command from an unsafe state) */
    SLIPSTEP_RUN_FAILED = 3    /* a run or write aborted midway */
} slipstep_status;

SLIPSTEP_API const char* slipstep_last_error(void);
SLIPSTEP_API const char* slipstep_version(void);

/* ---- gait description and point-mass primitives ----------------------- */

/* omega = sqrt(g/h) is derived by slipstep_gait_init; treat it as
   read-only. Positions are CoM offsets from the stance-foot pivot [m],
   velocities in m/s, step lengths in m, durations in s. */
typedef struct slipstep_gait {
    double g;
    double h;
    double omega;
    double mu;
    double mass;
    double L_star;
    double T_star;
} slipstep_gait;

typedef struct slipstep_state {
    double x;
    double xd;
} slipstep_state;

SLIPSTEP_API slipstep_status slipstep_gait_init(slipstep_gait* out, double g,
                                                double h, double mu,
                                                double mass, double L_star,
                                                double T_star);

/* The state that reproduces itself under an (L_star, T_star) step. */
SLIPSTEP_API slipstep_status slipstep_fixed_point(const slipstep_gait* gp,
                                                  slipstep_state* out);

/* In-step flow of xdd = omega^2 x after time t >= 0. */
SLIPSTEP_API slipstep_status slipstep_flow(const slipstep_gait* gp,
                                           slipstep_state s0, double t,
                                           slipstep_state* out);

/* Step-to-step map: flow for T, then shift the pivot by L. */
SLIPSTEP_API slipstep_status slipstep_step_map(const slipstep_gait* gp,
                                               slipstep_state s0, double L,
                                               double T, slipstep_state* out);

/* Velocity magnitude beyond which no step length recovers a T-step. */
SLIPSTEP_API slipstep_status slipstep_critical_velocity(
    const slipstep_gait* gp, double T, double* out);

/* Region membership of a step-initial state for duration T. Flags are 0/1;
   t_m/x_m describe the interior |x| extremum and are meaningful only when
   has_extremum is set. Margins are mu*h - |x| at the step ends (> 0 inside). */
typedef struct slipstep_regions {
    int in_S0; /* no slip at step start */
    int in_Sm; /* interior extremum within the friction bound */
    int in_ST; /* no slip at step end */
    int in_Rm; /* velocity reverses inside the step */
    int in_S;  /* whole step within the bound */
    int in_D;  /* starts inside, exceeds the bound before T */
    int in_A;  /* recoverable by shortening this step */
    int has_extremum;
    double t_m;
    double x_m;
    double margin_S0;
    double margin_ST;
} slipstep_regions;

SLIPSTEP_API slipstep_status slipstep_classify(const slipstep_gait* gp,
                                               slipstep_state s, double T,
                                               slipstep_regions* out);

/* Open interval; empty iff !(lower < upper). */
typedef struct slipstep_interval {
    double lower;
    double upper;
} slipstep_interval;

/* Step lengths whose successor state is again safe for a T-step. */
SLIPSTEP_API slipstep_status slipstep_safe_lengths(const slipstep_gait* gp,
                                                   slipstep_state s, double T,
                                                   slipstep_interval* out);

/* The per-step controller choice for a T_star step: midpoint of the safe
   range intersected with the deviation-shrinking range. PRECONDITION when
   the state is outside the safe region. */
SLIPSTEP_API slipstep_status slipstep_step_length(const slipstep_gait* gp,
                                                  slipstep_state s,
                                                  double* L);

/* Region boundary polylines as CSV (region,branch,x,xdot) for phase-plane
   plots. Refuses existing paths unless force is set. */
SLIPSTEP_API slipstep_status slipstep_export_regions(const slipstep_gait* gp,
                                                     double T, int n_pts,
                                                     const char* path,
                                                     int force);

/* ---- point-mass scenario simulation ------------------------------------ */

typedef struct slipstep_scenario slipstep_scenario;
typedef struct slipstep_trace slipstep_trace;

/* Scenario text format: "key = value" lines, '#' comments. Keys: g, h, mu,
   mass, L_star, T_star, x0, xdot0, n_steps, sample_dt, conv_tol, kappa,
   fixed_border, and repeatable "event = <step> <push|switch_gait|set_height>
   <args>". */
SLIPSTEP_API slipstep_status slipstep_scenario_load(const char* path,
                                                    slipstep_scenario** out);
SLIPSTEP_API slipstep_status slipstep_scenario_parse(const char* text,
                                                     slipstep_scenario** out);
/* Same keys as the file format; "event" appends. */
SLIPSTEP_API slipstep_status slipstep_scenario_set(slipstep_scenario* sc,
                                                   const char* key,
                                                   const char* value);
/* The gait the scenario starts from (before any switch events). */
SLIPSTEP_API slipstep_status slipstep_scenario_gait(const slipstep_scenario* sc,
                                                    slipstep_gait* out);
SLIPSTEP_API void slipstep_scenario_free(slipstep_scenario* sc);

SLIPSTEP_API slipstep_status slipstep_scenario_run(const slipstep_scenario* sc,
                                                   slipstep_trace** out);
SLIPSTEP_API void slipstep_trace_free(slipstep_trace* tr);

/* "converged" | "running" | "slipped" | "unrecoverable" */
SLIPSTEP_API const char* slipstep_trace_outcome(const slipstep_trace* tr);
SLIPSTEP_API int slipstep_trace_steps(const slipstep_trace* tr);
/* Leading steps before the gait deviation settles below the scenario's
   convergence tolerance for good. */
SLIPSTEP_API int slipstep_trace_transient_steps(const slipstep_trace* tr);
/* Peak friction demand |x|/h over every logged sample. */
SLIPSTEP_API double slipstep_trace_peak_mu_r(const slipstep_trace* tr);

typedef struct slipstep_step_info {
    int step;
    double t_start;
    double x, xd;       /* state at step start, after events */
    double L, T;        /* commanded */
    const char* mode;   /* nominal | fixed_border | moving_border |
                           unrecoverable; owned by the trace */
    double mu_r_peak;
    double deviation;   /* from the active gait's fixed point */
} slipstep_step_info;

SLIPSTEP_API slipstep_status slipstep_trace_step(const slipstep_trace* tr,
                                                 int i,
                                                 slipstep_step_info* out);

/* Writes <prefix>trace.csv and <prefix>summary.txt. */
SLIPSTEP_API slipstep_status slipstep_trace_export(const slipstep_trace* tr,
                                                   const char* prefix,
                                                   int force);

/* ---- articulated six-joint rollout ------------------------------------- */

typedef struct slipstep_biped slipstep_biped;
typedef struct slipstep_rollout slipstep_rollout;

/* Biped scenario text format: keys model (path to a link-parameter file,
   relative to the scenario file), mu, L_star, T_star, com_h, n_steps, dt,
   kp, kd, rho, apex, kappa, fixed_border, repeatable "push = <step>
   <impulse>". */
SLIPSTEP_API slipstep_status slipstep_biped_load(const char* path,
                                                 slipstep_biped** out);
SLIPSTEP_API slipstep_status slipstep_biped_set(slipstep_biped* sc,
                                                const char* key,
                                                const char* value);
SLIPSTEP_API void slipstep_biped_free(slipstep_biped* sc);

/* Full closed-loop rollout (plan, track, exchange). joint_log_path, when
   non-NULL, receives per-sample CSV rows
   t,q1..q6,qd1..qd6,tau1..tau6,x_cop,fn,mu_r. */
SLIPSTEP_API slipstep_status slipstep_biped_run(const slipstep_biped* sc,
                                                const char* joint_log_path,
                                                int force,
                                                slipstep_rollout** out);
SLIPSTEP_API void slipstep_rollout_free(slipstep_rollout* r);

/* "completed" | "slipped" | "lift_off" | "scuffed" | "unrecoverable" |
   "planner_failure" */
SLIPSTEP_API const char* slipstep_rollout_outcome(const slipstep_rollout* r);
SLIPSTEP_API const char* slipstep_rollout_detail(const slipstep_rollout* r);
SLIPSTEP_API int slipstep_rollout_steps(const slipstep_rollout* r);
/* Multi-line human-readable report (outcome, extremes, per-step table). */
SLIPSTEP_API const char* slipstep_rollout_format(const slipstep_rollout* r);
/* Trajectory extremes: any pointer may be NULL to skip that field. */
SLIPSTEP_API slipstep_status slipstep_rollout_margins(const slipstep_rollout* r,
                                                      double* mu_r_peak,
                                                      double* min_fn,
                                                      double* cop_min,
                                                      double* cop_max);

/* ---- built-in verification suite --------------------------------------- */

/* Called once per finished check with a formatted "PASS/FAIL name time
   detail" line. */
typedef void (*slipstep_check_cb)(const char* line, void* user);

/* Runs every check whose name contains filter (NULL or "" = all) and stores
   the failure count. BAD_INPUT when the filter matches nothing. */
SLIPSTEP_API slipstep_status slipstep_run_checks(const char* filter,
                                                 slipstep_check_cb on_check,
                                                 void* user, int* n_failed);

#ifdef __cplusplus
}
#endif

#endif /* SLIPSTEP_H */
