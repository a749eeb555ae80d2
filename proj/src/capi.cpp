// C facade over the C++ core. Nothing here computes; every entry point
// converts arguments, forwards, and maps exceptions onto status codes:
//   invalid_argument  -> SLIPSTEP_BAD_INPUT
//   precondition_error-> SLIPSTEP_PRECONDITION
//   anything else     -> SLIPSTEP_RUN_FAILED
// The offending message lands in a thread-local buffer for
// slipstep_last_error(). Out parameters are written only on success.

#include "slipstep.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "slipstep/acceptance.hpp"
#include "slipstep/biped/rollout.hpp"
#include "slipstep/control.hpp"
#include "slipstep/errors.hpp"
#include "slipstep/lip.hpp"
#include "slipstep/safety.hpp"
#include "slipstep/scenario.hpp"

namespace {

thread_local std::string g_last_error;

template <class Fn>
slipstep_status guarded(Fn&& fn) {
    try {
        fn();
        return SLIPSTEP_OK;
    } catch (const slipstep::precondition_error& e) {
        g_last_error = e.what();
        return SLIPSTEP_PRECONDITION;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return SLIPSTEP_BAD_INPUT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SLIPSTEP_RUN_FAILED;
    }
}

slipstep_status null_arg(const char* what) {
    g_last_error = std::string("null ") + what;
    return SLIPSTEP_BAD_INPUT;
}

slipstep::GaitParams to_params(const slipstep_gait& g) {
    // re-validate: the caller may have edited fields after gait_init
    return slipstep::make_params(g.g, g.h, g.mu, g.mass, g.L_star, g.T_star);
}

slipstep_state from_state(const slipstep::StepState& s) { return {s.x, s.xd}; }

void check_fresh(const char* path, int force) {
    if (!force && std::filesystem::exists(path))
        throw std::invalid_argument("refusing to overwrite existing '" +
                                    std::string(path) +
                                    "' (pass force/--force)");
}

} // namespace

extern "C" {

const char* slipstep_last_error(void) { return g_last_error.c_str(); }

const char* slipstep_version(void) { return "1.0.0"; }

/* ---- gait + point-mass primitives ---- */

slipstep_status slipstep_gait_init(slipstep_gait* out, double g, double h,
                                   double mu, double mass, double L_star,
                                   double T_star) {
    if (!out) return null_arg("gait output");
    return guarded([&] {
        const slipstep::GaitParams p =
            slipstep::make_params(g, h, mu, mass, L_star, T_star);
        *out = {p.g, p.h, p.omega, p.mu, p.mass, p.L_star, p.T_star};
    });
}

slipstep_status slipstep_fixed_point(const slipstep_gait* gp,
                                     slipstep_state* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("state output");
    return guarded([&] {
        const slipstep::GaitParams p = to_params(*gp);
        *out = from_state(slipstep::fixed_point(p.L_star, p.T_star, p.omega));
    });
}

slipstep_status slipstep_flow(const slipstep_gait* gp, slipstep_state s0,
                              double t, slipstep_state* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("state output");
    return guarded([&] {
        const slipstep::GaitParams p = to_params(*gp);
        *out = from_state(slipstep::flow({s0.x, s0.xd}, t, p.omega));
    });
}

slipstep_status slipstep_step_map(const slipstep_gait* gp, slipstep_state s0,
                                  double L, double T, slipstep_state* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("state output");
    return guarded([&] {
        const slipstep::GaitParams p = to_params(*gp);
        *out = from_state(slipstep::step_map({s0.x, s0.xd}, L, T, p.omega));
    });
}

slipstep_status slipstep_critical_velocity(const slipstep_gait* gp, double T,
                                           double* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("output");
    return guarded(
        [&] { *out = slipstep::critical_velocity(to_params(*gp), T); });
}

slipstep_status slipstep_classify(const slipstep_gait* gp, slipstep_state s,
                                  double T, slipstep_regions* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("regions output");
    return guarded([&] {
        const slipstep::RegionReport r =
            slipstep::classify_state({s.x, s.xd}, to_params(*gp), T);
        slipstep_regions c{};
        c.in_S0 = r.in_S0;
        c.in_Sm = r.in_Sm;
        c.in_ST = r.in_ST;
        c.in_Rm = r.in_Rm;
        c.in_S = r.in_S;
        c.in_D = r.in_D;
        c.in_A = r.in_A;
        c.has_extremum = r.t_m.has_value();
        c.t_m = r.t_m.value_or(0.0);
        c.x_m = r.x_m.value_or(0.0);
        c.margin_S0 = r.margin_S0;
        c.margin_ST = r.margin_ST;
        *out = c;
    });
}

slipstep_status slipstep_safe_lengths(const slipstep_gait* gp,
                                      slipstep_state s, double T,
                                      slipstep_interval* out) {
    if (!gp) return null_arg("gait");
    if (!out) return null_arg("interval output");
    return guarded([&] {
        const slipstep::LengthInterval r =
            slipstep::safe_length_range({s.x, s.xd}, to_params(*gp), T);
        *out = {r.lower, r.upper};
    });
}

slipstep_status slipstep_step_length(const slipstep_gait* gp,
                                     slipstep_state s, double* L) {
    if (!gp) return null_arg("gait");
    if (!L) return null_arg("length output");
    return guarded(
        [&] { *L = slipstep::step_length_command({s.x, s.xd}, to_params(*gp)); });
}

slipstep_status slipstep_export_regions(const slipstep_gait* gp, double T,
                                        int n_pts, const char* path,
                                        int force) {
    if (!gp) return null_arg("gait");
    if (!path) return null_arg("path");
    return guarded([&] {
        const slipstep::GaitParams p = to_params(*gp);
        check_fresh(path, force);
        std::ofstream f(path);
        if (!f)
            throw std::runtime_error("cannot write '" + std::string(path) +
                                     "'");
        slipstep::export_region_boundaries(f, p, T, n_pts);
    });
}

/* ---- point-mass scenarios ---- */

struct slipstep_scenario {
    slipstep::ScenarioConfig cfg;
};

struct slipstep_trace {
    slipstep::Trace tr;
    int transient = 0;
    double peak_mu_r = 0.0;
};

slipstep_status slipstep_scenario_load(const char* path,
                                       slipstep_scenario** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("scenario output");
    return guarded(
        [&] { *out = new slipstep_scenario{slipstep::load_scenario(path)}; });
}

slipstep_status slipstep_scenario_parse(const char* text,
                                        slipstep_scenario** out) {
    if (!text) return null_arg("text");
    if (!out) return null_arg("scenario output");
    return guarded([&] {
        std::istringstream in(text);
        *out = new slipstep_scenario{slipstep::parse_scenario(in)};
    });
}

slipstep_status slipstep_scenario_set(slipstep_scenario* sc, const char* key,
                                      const char* value) {
    if (!sc) return null_arg("scenario");
    if (!key) return null_arg("key");
    if (!value) return null_arg("value");
    return guarded([&] { slipstep::apply_override(sc->cfg, key, value); });
}

slipstep_status slipstep_scenario_gait(const slipstep_scenario* sc,
                                       slipstep_gait* out) {
    if (!sc) return null_arg("scenario");
    if (!out) return null_arg("gait output");
    const slipstep::GaitParams& p = sc->cfg.params;
    *out = {p.g, p.h, p.omega, p.mu, p.mass, p.L_star, p.T_star};
    return SLIPSTEP_OK;
}

void slipstep_scenario_free(slipstep_scenario* sc) { delete sc; }

slipstep_status slipstep_scenario_run(const slipstep_scenario* sc,
                                      slipstep_trace** out) {
    if (!sc) return null_arg("scenario");
    if (!out) return null_arg("trace output");
    return guarded([&] {
        auto* tr = new slipstep_trace{slipstep::run(sc->cfg), 0, 0.0};
        tr->transient =
            slipstep::transient_step_count(tr->tr, sc->cfg.conv_tol);
        for (const auto& s : tr->tr.samples)
            tr->peak_mu_r = std::max(tr->peak_mu_r, s.mu_r);
        *out = tr;
    });
}

void slipstep_trace_free(slipstep_trace* tr) { delete tr; }

const char* slipstep_trace_outcome(const slipstep_trace* tr) {
    return tr ? slipstep::to_string(tr->tr.outcome) : "";
}

int slipstep_trace_steps(const slipstep_trace* tr) {
    return tr ? static_cast<int>(tr->tr.steps.size()) : 0;
}

int slipstep_trace_transient_steps(const slipstep_trace* tr) {
    return tr ? tr->transient : 0;
}

double slipstep_trace_peak_mu_r(const slipstep_trace* tr) {
    return tr ? tr->peak_mu_r : 0.0;
}

slipstep_status slipstep_trace_step(const slipstep_trace* tr, int i,
                                    slipstep_step_info* out) {
    if (!tr) return null_arg("trace");
    if (!out) return null_arg("step output");
    if (i < 0 || i >= static_cast<int>(tr->tr.steps.size())) {
        g_last_error = "step index " + std::to_string(i) + " out of range [0, " +
                       std::to_string(tr->tr.steps.size()) + ")";
        return SLIPSTEP_BAD_INPUT;
    }
    const slipstep::StepRecord& r = tr->tr.steps[size_t(i)];
    out->step = r.step;
    out->t_start = r.t_start;
    out->x = r.s0.x;
    out->xd = r.s0.xd;
    out->L = r.cmd.L;
    out->T = r.cmd.T;
    out->mode = slipstep::to_string(r.cmd.mode);
    out->mu_r_peak = r.mu_r_peak;
    out->deviation = r.deviation;
    return SLIPSTEP_OK;
}

slipstep_status slipstep_trace_export(const slipstep_trace* tr,
                                      const char* prefix, int force) {
    if (!tr) return null_arg("trace");
    if (!prefix) return null_arg("prefix");
    return guarded(
        [&] { slipstep::export_trace(tr->tr, prefix, force != 0); });
}

/* ---- articulated rollouts ---- */

struct slipstep_biped {
    slipstep::biped::BipedScenario sc;
    std::string base_dir;  // for resolving model paths in overrides
};

struct slipstep_rollout {
    slipstep::biped::RolloutResult r;
    std::string formatted;
};

slipstep_status slipstep_biped_load(const char* path, slipstep_biped** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("scenario output");
    return guarded([&] {
        auto* h = new slipstep_biped{
            slipstep::biped::load_biped_scenario(path),
            std::filesystem::path(path).parent_path().string()};
        *out = h;
    });
}

slipstep_status slipstep_biped_set(slipstep_biped* sc, const char* key,
                                   const char* value) {
    if (!sc) return null_arg("scenario");
    if (!key) return null_arg("key");
    if (!value) return null_arg("value");
    return guarded([&] {
        slipstep::biped::apply_biped_override(
            sc->sc, key, value, sc->base_dir.empty() ? "." : sc->base_dir);
    });
}

void slipstep_biped_free(slipstep_biped* sc) { delete sc; }

slipstep_status slipstep_biped_run(const slipstep_biped* sc,
                                   const char* joint_log_path, int force,
                                   slipstep_rollout** out) {
    if (!sc) return null_arg("scenario");
    if (!out) return null_arg("rollout output");
    return guarded([&] {
        std::ofstream log;
        if (joint_log_path) {
            check_fresh(joint_log_path, force);
            log.open(joint_log_path);
            if (!log)
                throw std::runtime_error("cannot write '" +
                                         std::string(joint_log_path) + "'");
        }
        auto* h = new slipstep_rollout{};
        h->r = slipstep::biped::run_full_scenario(
            sc->sc, joint_log_path ? &log : nullptr);
        h->formatted = slipstep::biped::format_rollout(h->r);
        *out = h;
    });
}

void slipstep_rollout_free(slipstep_rollout* r) { delete r; }

const char* slipstep_rollout_outcome(const slipstep_rollout* r) {
    return r ? r->r.outcome.c_str() : "";
}

const char* slipstep_rollout_detail(const slipstep_rollout* r) {
    return r ? r->r.detail.c_str() : "";
}

int slipstep_rollout_steps(const slipstep_rollout* r) {
    return r ? r->r.steps_completed : 0;
}

const char* slipstep_rollout_format(const slipstep_rollout* r) {
    return r ? r->formatted.c_str() : "";
}

slipstep_status slipstep_rollout_margins(const slipstep_rollout* r,
                                         double* mu_r_peak, double* min_fn,
                                         double* cop_min, double* cop_max) {
    if (!r) return null_arg("rollout");
    if (mu_r_peak) *mu_r_peak = r->r.report.mu_r_peak;
    if (min_fn) *min_fn = r->r.report.min_fn;
    if (cop_min) *cop_min = r->r.report.cop_min;
    if (cop_max) *cop_max = r->r.report.cop_max;
    return SLIPSTEP_OK;
}

/* ---- verification suite ---- */

slipstep_status slipstep_run_checks(const char* filter,
                                    slipstep_check_cb on_check, void* user,
                                    int* n_failed) {
    return guarded([&] {
        const auto checks = slipstep::run_acceptance(
            filter ? filter : "",
            [&](const slipstep::AcceptanceCheck& c) {
                if (on_check) on_check(slipstep::format_check(c).c_str(), user);
            });
        if (checks.empty())
            throw std::invalid_argument("no checks match filter '" +
                                        std::string(filter ? filter : "") +
                                        "'");
        int failed = 0;
        for (const auto& c : checks) failed += !c.passed;
        if (n_failed) *n_failed = failed;
    });
}

} // extern "C"
