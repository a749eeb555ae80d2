#include "slipstep/biped/rollout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "slipstep/biped/dynamics.hpp"
#include "slipstep/biped/kinematics.hpp"

namespace slipstep::biped {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(unsigned(s[a]))) ++a;
    while (b > a && std::isspace(unsigned(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw std::invalid_argument("biped scenario: bad numeric value '" + v +
                                    "' for " + key);
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw std::invalid_argument("biped scenario: bad integer value '" + v +
                                    "' for " + key);
    }
}

bool parse_switch(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw std::invalid_argument("biped scenario: bad on/off value '" + v +
                                "' for " + key);
}

const char* mode_name(StepMode m) {
    switch (m) {
        case StepMode::nominal: return "nominal";
        case StepMode::fixed_border: return "fixed_border";
        case StepMode::moving_border: return "moving_border";
        case StepMode::unrecoverable: return "unrecoverable";
    }
    return "?";
}

// Shared by the file parser and single-key overrides. Returns true when the
// key set a model (the parser requires one before the scenario is usable).
bool apply_key(BipedScenario& sc, const std::string& key,
               const std::string& value, const std::string& base_dir) {
    if (key == "model") {
        std::filesystem::path p(value);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        sc.model = load_model(p.string());
        return true;
    } else if (key == "mu") {
        sc.mu = parse_double(value, key);
    } else if (key == "L_star") {
        sc.L_star = parse_double(value, key);
    } else if (key == "T_star") {
        sc.T_star = parse_double(value, key);
    } else if (key == "com_h") {
        sc.com_h = parse_double(value, key);
    } else if (key == "n_steps") {
        sc.n_steps = parse_int(value, key);
    } else if (key == "dt") {
        sc.dt = parse_double(value, key);
    } else if (key == "kp") {
        sc.kp = parse_double(value, key);
    } else if (key == "kd") {
        sc.kd = parse_double(value, key);
    } else if (key == "rho") {
        sc.planner.rho = parse_double(value, key);
    } else if (key == "apex") {
        sc.planner.apex = parse_double(value, key);
    } else if (key == "kappa") {
        sc.sup.kappa = parse_double(value, key);
    } else if (key == "fixed_border") {
        sc.sup.fixed_border_enabled = parse_switch(value, key);
    } else if (key == "push") {
        std::istringstream iss(value);
        std::string a, b, rest;
        if (!(iss >> a >> b) || (iss >> rest))
            throw std::invalid_argument(
                "biped scenario: push needs '<step> <impulse>'");
        sc.pushes.push_back(
            {parse_int(a, "push step"), parse_double(b, "push impulse")});
    } else {
        throw std::invalid_argument("biped scenario: unknown key '" + key +
                                    "'");
    }
    return false;
}

} // namespace

BipedScenario parse_biped_scenario(std::istream& in,
                                   const std::string& base_dir) {
    BipedScenario sc;
    bool have_model = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("biped scenario: line " +
                                        std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (apply_key(sc, key, value, base_dir)) have_model = true;
    }
    if (!have_model)
        throw std::invalid_argument("biped scenario: missing key 'model'");
    if (sc.n_steps < 1)
        throw std::invalid_argument("biped scenario: n_steps must be >= 1");
    if (!(sc.dt > 0.0) || !(sc.T_star > 0.0) || !(sc.mu > 0.0) ||
        !(sc.com_h > 0.0))
        throw std::invalid_argument(
            "biped scenario: dt, T_star, mu, com_h must be positive");
    return sc;
}

BipedScenario load_biped_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("biped scenario: cannot open '" + path +
                                    "'");
    return parse_biped_scenario(
        in, std::filesystem::path(path).parent_path().string());
}

void apply_biped_override(BipedScenario& sc, const std::string& key,
                          const std::string& value,
                          const std::string& base_dir) {
    apply_key(sc, trim(key), trim(value), base_dir);
}

namespace {

struct Monitors {
    double mu_r_peak = 0.0;
    double min_fn = std::numeric_limits<double>::infinity();
    double cop_min = std::numeric_limits<double>::infinity();
    double cop_max = -std::numeric_limits<double>::infinity();
    double tracking_err = 0.0;
    double min_clearance = std::numeric_limits<double>::infinity();
};

void log_row(std::ostream* log, double t, const Vec6& q, const Vec6& qd,
             const Vec6& tau, const Reaction& r) {
    if (!log) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    *log << buf;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.9g", v);
        *log << buf;
    };
    for (int i = 0; i < 6; ++i) put(q[i]);
    for (int i = 0; i < 6; ++i) put(qd[i]);
    for (int i = 0; i < 6; ++i) put(tau[i]);
    put(r.x_cop);
    put(r.fy);
    put(r.mu_r);
    *log << '\n';
}

} // namespace

RolloutResult run_full_scenario(const BipedScenario& sc,
                                std::ostream* joint_log) {
    validate_model(sc.model);
    const GaitParams p =
        make_params(sc.model.g, sc.com_h, sc.mu, sc.model.total_mass(),
                    sc.L_star, sc.T_star);
    const StepState fp = fixed_point(p.L_star, p.T_star, p.omega);

    RolloutResult out;
    out.outcome = "completed";
    out.report.min_fn = std::numeric_limits<double>::infinity();
    out.report.cop_min = std::numeric_limits<double>::infinity();
    out.report.cop_max = -std::numeric_limits<double>::infinity();
    out.report.knee_margin_min = std::numeric_limits<double>::infinity();
    out.report.min_clearance = std::numeric_limits<double>::infinity();

    if (joint_log) *joint_log << "t,q1,q2,q3,q4,q5,q6,qd1,qd2,qd3,qd4,qd5,qd6,"
                                 "tau1,tau2,tau3,tau4,tau5,tau6,x_cop,fn,mu_r\n";

    // start on the desired cycle: previous landing was L_star behind
    BoundaryState bs;
    try {
        bs = solve_boundary_state(sc.model, -sc.L_star, fp.x, fp.xd, sc.com_h);
    } catch (const std::exception& e) {
        out.outcome = "planner_failure";
        out.detail = std::string("initial pose: ") + e.what();
        return out;
    }
    Vec6 q = bs.q, qd = bs.qdot;

    SupervisorState sup;
    double t_abs = 0.0;

    for (int i = 0; i < sc.n_steps; ++i) {
        for (const auto& push : sc.pushes)
            if (push.at_step == i) qd = impact(sc.model, q, qd, push.impulse);

        const Eigen::Vector4d cs = com_state(sc.model, q, qd);
        const StepState s{cs[0], cs[1]};

        StepRecord rec;
        rec.index = i;
        rec.com_start = s;
        rec.deviation = std::hypot(s.x - fp.x, s.xd - fp.xd);

        StepCommand cmd;
        try {
            cmd = supervise(sup, s, p, sc.sup);
        } catch (const std::exception& e) {
            out.outcome = "planner_failure";
            out.detail = "supervisor at step " + std::to_string(i) + ": " + e.what();
            out.steps.push_back(rec);
            return out;
        }
        rec.mode = cmd.mode;
        rec.L = cmd.L;
        rec.T = cmd.T;
        if (cmd.mode == StepMode::unrecoverable) {
            std::ostringstream d;
            d << "state (" << s.x << ", " << s.xd
              << ") beyond recovery at step " << i;
            out.outcome = "unrecoverable";
            out.detail = d.str();
            out.steps.push_back(rec);
            return out;
        }

        PlanDiagnostics pd;
        QuinticPlan plan;
        try {
            plan = plan_step(sc.model, q, qd, cmd.L, cmd.T, p.omega, sc.com_h,
                             sc.planner, &pd);
        } catch (const std::exception& e) {
            out.outcome = "planner_failure";
            out.detail = "step " + std::to_string(i) + ": " + e.what();
            out.steps.push_back(rec);
            return out;
        }
        rec.plan_defect = pd.max_defect;
        rec.plan_cop_residual = std::max(std::fabs(pd.cop0), std::fabs(pd.copT));
        out.report.plan_defect_max =
            std::max(out.report.plan_defect_max, pd.max_defect);
        out.report.plan_cop_residual_max =
            std::max(out.report.plan_cop_residual_max, rec.plan_cop_residual);
        out.report.knee_margin_min =
            std::min(out.report.knee_margin_min, pd.knee_margin);

        const int n_sub = std::max(1, int(std::lround(cmd.T / sc.dt)));
        const double h = cmd.T / n_sub;
        Monitors mon;
        bool aborted = false;

        // plant acceleration under the controller's torque at (t, q, qd);
        // exposes tau and the reaction so monitors see what was applied
        auto stage = [&](double t, const Vec6& qq, const Vec6& vv, Vec6* tau_out,
                         Reaction* r_out) {
            const Mat6 M = mass_matrix(sc.model, qq);
            const Vec6 bias = bias_forces(sc.model, qq, vv);
            const Vec6 e = plan.q(t) - qq;
            const Vec6 ed = plan.qdot(t) - vv;
            const Vec6 qdd_ref = plan.qddot(t) + sc.kd * ed + sc.kp * e;
            const Vec6 tau = M * qdd_ref + bias;
            const Vec6 qdd = M.ldlt().solve(tau - bias);
            if (tau_out) *tau_out = tau;
            if (r_out) *r_out = reaction(sc.model, qq, vv, qdd);
            return qdd;
        };

        for (int k = 0; k <= n_sub; ++k) {
            const double t = k * h;
            Vec6 tau;
            Reaction r;
            const Vec6 a1 = stage(t, q, qd, &tau, &r);
            log_row(joint_log, t_abs + t, q, qd, tau, r);

            const Vec6 e = plan.q(t) - q;
            mon.tracking_err =
                std::max(mon.tracking_err, e.lpNorm<Eigen::Infinity>());
            const Kinematics kin = kinematics(sc.model, q, qd);
            if (k > 0 && k < n_sub)
                mon.min_clearance = std::min(mon.min_clearance, kin.sole.y());

            if (r.lift_off) {
                std::ostringstream d;
                d << "normal force vanished at step " << i << ", t=" << t;
                out.outcome = "lift_off";
                out.detail = d.str();
                aborted = true;
            } else {
                mon.mu_r_peak = std::max(mon.mu_r_peak, r.mu_r);
                mon.min_fn = std::min(mon.min_fn, r.fy);
                mon.cop_min = std::min(mon.cop_min, r.x_cop);
                mon.cop_max = std::max(mon.cop_max, r.x_cop);
                if (r.mu_r >= sc.mu) {
                    std::ostringstream d;
                    d << "friction demand " << r.mu_r << " >= " << sc.mu
                      << " at step " << i << ", t=" << t;
                    out.outcome = "slipped";
                    out.detail = d.str();
                    aborted = true;
                }
            }
            if (!aborted && kin.sole.y() < -1e-3 && t < 0.9 * cmd.T) {
                std::ostringstream d;
                d << "swing sole dug in (" << kin.sole.y() << " m) at step "
                  << i << ", t=" << t;
                out.outcome = "scuffed";
                out.detail = d.str();
                aborted = true;
            }
            if (aborted || k == n_sub) break;

            // RK4 advance
            const Vec6 q2 = q + 0.5 * h * qd, v2 = qd + 0.5 * h * a1;
            const Vec6 a2 = stage(t + 0.5 * h, q2, v2, nullptr, nullptr);
            const Vec6 q3 = q + 0.5 * h * v2, v3 = qd + 0.5 * h * a2;
            const Vec6 a3 = stage(t + 0.5 * h, q3, v3, nullptr, nullptr);
            const Vec6 q4 = q + h * v3, v4 = qd + h * a3;
            const Vec6 a4 = stage(t + h, q4, v4, nullptr, nullptr);
            const Vec6 dq = (h / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4);
            const Vec6 dv = (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            q += dq;
            qd += dv;
        }

        rec.mu_r_peak = mon.mu_r_peak;
        rec.min_fn = mon.min_fn;
        rec.cop_min = mon.cop_min;
        rec.cop_max = mon.cop_max;
        rec.tracking_err = mon.tracking_err;
        rec.min_clearance = mon.min_clearance;

        if (!aborted) {
            const Kinematics kin = kinematics(sc.model, q, qd);
            rec.touchdown_speed = (kin.J_sole * kin.theta_dot).norm();
            rec.actual_L = kin.sole.x();

            out.report.min_fn = std::min(out.report.min_fn, mon.min_fn);
            out.report.mu_r_peak = std::max(out.report.mu_r_peak, mon.mu_r_peak);
            out.report.cop_min = std::min(out.report.cop_min, mon.cop_min);
            out.report.cop_max = std::max(out.report.cop_max, mon.cop_max);
            out.report.touchdown_speed_max =
                std::max(out.report.touchdown_speed_max, rec.touchdown_speed);
            out.report.tracking_err_max =
                std::max(out.report.tracking_err_max, mon.tracking_err);
            out.report.min_clearance =
                std::min(out.report.min_clearance, mon.min_clearance);
        }

        out.steps.push_back(rec);
        if (aborted) return out;

        // support exchange: relabel and move the origin to the landed ankle
        Vec6 q_new, qd_new;
        exchange_support(q, qd, q_new, qd_new);
        q = q_new;
        qd = qd_new;
        t_abs += cmd.T;
        ++out.steps_completed;
        out.q_final = q;
        out.qd_final = qd;
    }
    return out;
}

std::string format_rollout(const RolloutResult& r) {
    std::ostringstream os;
    os << "outcome: " << r.outcome << "\n";
    if (!r.detail.empty()) os << "detail: " << r.detail << "\n";
    os << "steps_completed: " << r.steps_completed << "\n";
    if (r.steps_completed > 0) {
        const auto& rep = r.report;
        os << "min_fn: " << rep.min_fn << "\n"
           << "mu_r_peak: " << rep.mu_r_peak << "\n"
           << "cop_range: [" << rep.cop_min << ", " << rep.cop_max << "]\n"
           << "touchdown_speed_max: " << rep.touchdown_speed_max << "\n"
           << "tracking_err_max: " << rep.tracking_err_max << "\n"
           << "plan_defect_max: " << rep.plan_defect_max << "\n"
           << "plan_cop_residual_max: " << rep.plan_cop_residual_max << "\n"
           << "knee_margin_min: " << rep.knee_margin_min << "\n"
           << "min_clearance: " << rep.min_clearance << "\n";
    }
    os << "\nstep,mode,L,T,x0,xd0,mu_r_peak,min_fn,touchdown_speed,deviation\n";
    for (const auto& s : r.steps) {
        os << s.index << "," << mode_name(s.mode) << "," << s.L << "," << s.T
           << "," << s.com_start.x << "," << s.com_start.xd << ","
           << s.mu_r_peak << "," << s.min_fn << "," << s.touchdown_speed << ","
           << s.deviation << "\n";
    }
    return os.str();
}

} // namespace slipstep::biped
