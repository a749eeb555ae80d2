#include "slipstep/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slipstep/safety.hpp"

namespace slipstep {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::converged: return "converged";
        case Outcome::running: return "running";
        case Outcome::slipped: return "slipped";
        case Outcome::unrecoverable: return "unrecoverable";
    }
    return "?";
}

const char* to_string(StepMode m) {
    switch (m) {
        case StepMode::nominal: return "nominal";
        case StepMode::fixed_border: return "fixed_border";
        case StepMode::moving_border: return "moving_border";
        case StepMode::unrecoverable: return "unrecoverable";
    }
    return "?";
}

namespace {

double deviation_from_gait(const StepState& s, const GaitParams& p) {
    const StepState fp = fixed_point(p.L_star, p.T_star, p.omega);
    return std::hypot(s.x - fp.x, s.xd - fp.xd);
}

} // namespace

Trace run(const ScenarioConfig& cfg) {
    if (cfg.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    GaitParams p = make_params(cfg.params.g, cfg.params.h, cfg.params.mu,
                               cfg.params.mass, cfg.params.L_star, cfg.params.T_star);
    const double sample_dt = cfg.sample_dt > 0.0 ? cfg.sample_dt : p.T_star / 200.0;

    Trace tr;
    SupervisorState sup;
    StepState s = cfg.initial ? *cfg.initial
                              : fixed_point(p.L_star, p.T_star, p.omega);
    double t0 = 0.0;

    for (int i = 0; i < cfg.n_steps; ++i) {
        for (const Event& ev : cfg.events) {
            if (ev.at_step != i) continue;
            if (const auto* push = std::get_if<PushEvent>(&ev.action)) {
                s = apply_push(s, push->impulse, p.mass);
            } else if (const auto* sw = std::get_if<SwitchGaitEvent>(&ev.action)) {
                p = make_params(p.g, p.h, p.mu, p.mass, sw->L_star, sw->T_star);
            } else if (const auto* sh = std::get_if<SetHeightEvent>(&ev.action)) {
                p = make_params(p.g, sh->h, p.mu, p.mass, p.L_star, p.T_star);
            }
        }

        StepRecord rec;
        rec.step = i;
        rec.t_start = t0;
        rec.s0 = s;
        rec.cmd = supervise(sup, s, p, cfg.sup);

        if (rec.cmd.mode == StepMode::unrecoverable) {
            rec.mu_r_peak = required_friction(s.x, p.h);
            rec.deviation = deviation_from_gait(s, p);
            tr.steps.push_back(rec);
            tr.outcome = Outcome::unrecoverable;
            break;
        }

        const int n = std::max(1, int(std::ceil(rec.cmd.T / sample_dt)));
        const double dt = rec.cmd.T / n;
        double peak = 0.0;
        for (int k = 0; k <= n; ++k) {
            const StepState st = flow(s, k * dt, p.omega);
            const double mu_r = required_friction(st.x, p.h);
            peak = std::max(peak, mu_r);
            tr.samples.push_back({i, t0 + k * dt, st.x, st.xd, mu_r});
        }
        // The sampled maximum can sit between nodes; the interior stationary
        // point, when inside the step, gives the exact peak.
        if (auto e = extremum(s, p.omega)) {
            if (e->t_m > 0.0 && e->t_m < rec.cmd.T) {
                peak = std::max(peak, required_friction(e->x_m, p.h));
            }
        }
        rec.mu_r_peak = peak;

        if (peak >= p.mu) {
            rec.deviation = deviation_from_gait(s, p);
            tr.steps.push_back(rec);
            tr.outcome = Outcome::slipped;
            break;
        }

        s = step_map(s, rec.cmd.L, rec.cmd.T, p.omega);
        t0 += rec.cmd.T;
        rec.deviation = deviation_from_gait(s, p);
        tr.steps.push_back(rec);
    }

    tr.final_params = p;
    tr.final_state = s;
    if (tr.outcome == Outcome::running) {
        const int n = int(tr.steps.size());
        int settled = 0;
        for (int i = n - 1; i >= 0 && tr.steps[i].deviation < cfg.conv_tol; --i) ++settled;
        if (settled >= 5) tr.outcome = Outcome::converged;
    }
    return tr;
}

int transient_step_count(const Trace& trace, double tol) {
    int last = -1;
    for (int i = 0; i < int(trace.steps.size()); ++i) {
        if (trace.steps[i].deviation >= tol) last = i;
    }
    return last + 1;
}

} // namespace slipstep
