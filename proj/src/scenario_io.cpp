#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "slipstep/scenario.hpp"

namespace slipstep {

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
        throw std::invalid_argument("scenario: bad numeric value '" + v + "' for " + key);
    }
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (...) {
        throw std::invalid_argument("scenario: bad integer value '" + v + "' for " + key);
    }
}

bool parse_switch(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw std::invalid_argument("scenario: bad on/off value '" + v + "' for " + key);
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

Event parse_event(const std::string& value) {
    const auto tok = tokenize(value);
    if (tok.size() < 2) throw std::invalid_argument("scenario: event needs '<step> <kind> [args]'");
    Event ev;
    ev.at_step = parse_int(tok[0], "event step");
    const std::string& kind = tok[1];
    if (kind == "push") {
        if (tok.size() != 3) throw std::invalid_argument("scenario: push event needs one impulse argument");
        ev.action = PushEvent{parse_double(tok[2], "push impulse")};
    } else if (kind == "switch_gait") {
        if (tok.size() != 4) throw std::invalid_argument("scenario: switch_gait event needs L_star and T_star");
        ev.action = SwitchGaitEvent{parse_double(tok[2], "switch_gait L_star"),
                                    parse_double(tok[3], "switch_gait T_star")};
    } else if (kind == "set_height") {
        if (tok.size() != 3) throw std::invalid_argument("scenario: set_height event needs one height argument");
        ev.action = SetHeightEvent{parse_double(tok[2], "set_height h")};
    } else {
        throw std::invalid_argument("scenario: unknown event kind '" + kind + "'");
    }
    return ev;
}

struct RawGait {
    double g = 9.8, h = 1.0, mu = 0.3, mass = 50.0, L_star = 0.4, T_star = 0.4;
};

void set_key(ScenarioConfig& cfg, RawGait& raw, const std::string& key,
             const std::string& value) {
    if (key == "g") raw.g = parse_double(value, key);
    else if (key == "h") raw.h = parse_double(value, key);
    else if (key == "mu") raw.mu = parse_double(value, key);
    else if (key == "mass") raw.mass = parse_double(value, key);
    else if (key == "L_star") raw.L_star = parse_double(value, key);
    else if (key == "T_star") raw.T_star = parse_double(value, key);
    else if (key == "x0") {
        if (value == "auto") {
            cfg.initial.reset();
        } else {
            if (!cfg.initial) cfg.initial = StepState{};
            cfg.initial->x = parse_double(value, key);
        }
    } else if (key == "xdot0") {
        if (value == "auto") {
            cfg.initial.reset();
        } else {
            if (!cfg.initial) cfg.initial = StepState{};
            cfg.initial->xd = parse_double(value, key);
        }
    } else if (key == "n_steps") cfg.n_steps = parse_int(value, key);
    else if (key == "sample_dt") cfg.sample_dt = parse_double(value, key);
    else if (key == "conv_tol") cfg.conv_tol = parse_double(value, key);
    else if (key == "kappa") cfg.sup.kappa = parse_double(value, key);
    else if (key == "fixed_border") cfg.sup.fixed_border_enabled = parse_switch(value, key);
    else if (key == "event") cfg.events.push_back(parse_event(value));
    else throw std::invalid_argument("scenario: unknown key '" + key + "'");
}

void finalize(ScenarioConfig& cfg, const RawGait& raw) {
    cfg.params = make_params(raw.g, raw.h, raw.mu, raw.mass, raw.L_star, raw.T_star);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig cfg;
    RawGait raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("scenario: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        }
        set_key(cfg, raw, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    finalize(cfg, raw);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("scenario: cannot open '" + path + "'");
    return parse_scenario(f);
}

void print_scenario(const ScenarioConfig& cfg, std::ostream& out) {
    out << "g = " << fmt(cfg.params.g) << "\n";
    out << "h = " << fmt(cfg.params.h) << "\n";
    out << "mu = " << fmt(cfg.params.mu) << "\n";
    out << "mass = " << fmt(cfg.params.mass) << "\n";
    out << "L_star = " << fmt(cfg.params.L_star) << "\n";
    out << "T_star = " << fmt(cfg.params.T_star) << "\n";
    if (cfg.initial) {
        out << "x0 = " << fmt(cfg.initial->x) << "\n";
        out << "xdot0 = " << fmt(cfg.initial->xd) << "\n";
    } else {
        out << "x0 = auto\n";
    }
    out << "n_steps = " << cfg.n_steps << "\n";
    if (cfg.sample_dt > 0.0) out << "sample_dt = " << fmt(cfg.sample_dt) << "\n";
    out << "conv_tol = " << fmt(cfg.conv_tol) << "\n";
    out << "kappa = " << fmt(cfg.sup.kappa) << "\n";
    out << "fixed_border = " << (cfg.sup.fixed_border_enabled ? "on" : "off") << "\n";
    for (const Event& ev : cfg.events) {
        out << "event = " << ev.at_step << " ";
        if (const auto* push = std::get_if<PushEvent>(&ev.action)) {
            out << "push " << fmt(push->impulse);
        } else if (const auto* sw = std::get_if<SwitchGaitEvent>(&ev.action)) {
            out << "switch_gait " << fmt(sw->L_star) << " " << fmt(sw->T_star);
        } else if (const auto* sh = std::get_if<SetHeightEvent>(&ev.action)) {
            out << "set_height " << fmt(sh->h);
        }
        out << "\n";
    }
}

void apply_override(ScenarioConfig& cfg, const std::string& key,
                    const std::string& value) {
    RawGait raw;
    raw.g = cfg.params.g;
    raw.h = cfg.params.h;
    raw.mu = cfg.params.mu;
    raw.mass = cfg.params.mass;
    raw.L_star = cfg.params.L_star;
    raw.T_star = cfg.params.T_star;
    set_key(cfg, raw, trim(key), trim(value));
    finalize(cfg, raw);
}

namespace {

StepMode mode_from_string(const std::string& s) {
    if (s == "nominal") return StepMode::nominal;
    if (s == "fixed_border") return StepMode::fixed_border;
    if (s == "moving_border") return StepMode::moving_border;
    if (s == "unrecoverable") return StepMode::unrecoverable;
    throw std::invalid_argument("summary: unknown step mode '" + s + "'");
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "converged") return Outcome::converged;
    if (s == "running") return Outcome::running;
    if (s == "slipped") return Outcome::slipped;
    if (s == "unrecoverable") return Outcome::unrecoverable;
    throw std::invalid_argument("summary: unknown outcome '" + s + "'");
}

void check_fresh(const std::filesystem::path& p, bool force) {
    if (!force && std::filesystem::exists(p)) {
        throw std::invalid_argument("refusing to overwrite existing '" + p.string() +
                                    "' (pass force/--force)");
    }
}

} // namespace

void export_trace(const Trace& trace, const std::string& prefix, bool force) {
    const std::filesystem::path tracep = prefix + "trace.csv";
    const std::filesystem::path sump = prefix + "summary.txt";
    check_fresh(tracep, force);
    check_fresh(sump, force);
    if (tracep.has_parent_path()) std::filesystem::create_directories(tracep.parent_path());

    {
        std::ofstream f(tracep);
        if (!f) throw std::runtime_error("cannot write '" + tracep.string() + "'");
        f << "step,t,x,xdot,mu_r\n";
        for (const Sample& s : trace.samples) {
            f << s.step << "," << fmt(s.t) << "," << fmt(s.x) << "," << fmt(s.xd)
              << "," << fmt(s.mu_r) << "\n";
        }
    }
    {
        std::ofstream f(sump);
        if (!f) throw std::runtime_error("cannot write '" + sump.string() + "'");
        f << "outcome = " << to_string(trace.outcome) << "\n";
        f << "steps = " << trace.steps.size() << "\n";
        f << "transient_steps = " << transient_step_count(trace) << "\n";
        f << "final_x = " << fmt(trace.final_state.x) << "\n";
        f << "final_xdot = " << fmt(trace.final_state.xd) << "\n";
        f << "\n";
        f << "step,L,T,mode,mu_r_peak\n";
        for (const StepRecord& r : trace.steps) {
            f << r.step << "," << fmt(r.cmd.L) << "," << fmt(r.cmd.T) << ","
              << to_string(r.cmd.mode) << "," << fmt(r.mu_r_peak) << "\n";
        }
    }
}

Summary parse_summary(std::istream& in) {
    Summary sum;
    std::string line;
    bool in_table = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (!in_table) {
            if (line == "step,L,T,mode,mu_r_peak") {
                in_table = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("summary: malformed line '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "outcome") sum.outcome = outcome_from_string(value);
            else if (key == "transient_steps") sum.transient_steps = parse_int(value, key);
            else if (key == "steps" || key == "final_x" || key == "final_xdot") {
                // informational; round-trips through the rows / not needed
            } else {
                throw std::invalid_argument("summary: unknown key '" + key + "'");
            }
        } else {
            std::vector<std::string> cell;
            std::string cur;
            std::istringstream row(line);
            while (std::getline(row, cur, ',')) cell.push_back(trim(cur));
            if (cell.size() != 5) throw std::invalid_argument("summary: malformed row '" + line + "'");
            SummaryRow r;
            r.step = parse_int(cell[0], "step");
            r.L = parse_double(cell[1], "L");
            r.T = parse_double(cell[2], "T");
            r.mode = mode_from_string(cell[3]);
            r.mu_r_peak = parse_double(cell[4], "mu_r_peak");
            sum.rows.push_back(r);
        }
    }
    if (!in_table) throw std::invalid_argument("summary: missing step table");
    return sum;
}

Summary load_summary(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("summary: cannot open '" + path + "'");
    return parse_summary(f);
}

} // namespace slipstep
