#pragma once

// Discrete-step LIP walking simulator driven by the supervisor.
//
// A scenario is a gait configuration, an optional explicit initial state
// (defaults to the gait fixed point), and a list of events applied at step
// boundaries. The simulator samples the in-step flow for friction logging
// and reports a per-step command/peak table plus an overall outcome.

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slipstep/control.hpp"
#include "slipstep/lip.hpp"

namespace slipstep {

struct PushEvent {
    double impulse;  // horizontal CoM impulse [kg m/s], applied at step start
};
struct SwitchGaitEvent {
    double L_star;
    double T_star;
};
struct SetHeightEvent {
    double h;
};

struct Event {
    int at_step = 0;
    std::variant<PushEvent, SwitchGaitEvent, SetHeightEvent> action;
};

struct ScenarioConfig {
    GaitParams params{};
    std::optional<StepState> initial;  // nullopt: start on the fixed point
    std::vector<Event> events;
    int n_steps = 20;
    double sample_dt = 0.0;  // 0: default to T_star / 200 at load time
    double conv_tol = 1e-6;  // step-to-step deviation tolerance
    SupervisorOptions sup{};
};

enum class Outcome { converged, running, slipped, unrecoverable };

const char* to_string(Outcome o);
const char* to_string(StepMode m);

struct StepRecord {
    int step = 0;
    double t_start = 0.0;   // global time at step begin [s]
    StepState s0;            // state after events, before the step
    StepCommand cmd;
    double mu_r_peak = 0.0;  // max over the executed step
    double deviation = 0.0;  // |successor - active fixed point|
};

struct Sample {
    int step;
    double t;  // global time [s]
    double x;
    double xd;
    double mu_r;
};

struct Trace {
    std::vector<StepRecord> steps;
    std::vector<Sample> samples;
    Outcome outcome = Outcome::running;
    GaitParams final_params{};
    StepState final_state;
};

Trace run(const ScenarioConfig& cfg);

// Number of leading steps before the deviation stays below tol for the rest
// of the run. Equals the step count when it never settles.
int transient_step_count(const Trace& trace, double tol = 1e-6);

// --- scenario / trace text formats -------------------------------------

ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);
void print_scenario(const ScenarioConfig& cfg, std::ostream& out);

// Applies a single "key=value" override through the same parser rules used
// by the file format. "event" appends to the event list.
void apply_override(ScenarioConfig& cfg, const std::string& key,
                    const std::string& value);

// Writes <prefix>trace.csv (step,t,x,xdot,mu_r) and <prefix>summary.txt
// (key=value header plus a step,L,T,mode,mu_r_peak table). Refuses to
// overwrite existing files unless force is set.
void export_trace(const Trace& trace, const std::string& prefix, bool force);

struct SummaryRow {
    int step;
    double L;
    double T;
    StepMode mode;
    double mu_r_peak;
};

struct Summary {
    Outcome outcome = Outcome::running;
    int transient_steps = 0;
    std::vector<SummaryRow> rows;
};

Summary parse_summary(std::istream& in);
Summary load_summary(const std::string& path);

} // namespace slipstep
