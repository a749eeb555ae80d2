// Command-line front end. All functionality goes through the public C API,
// so this file doubles as a consumer test of the shared library surface.
//
// Exit codes (stable contract):
//   0  success
//   1  controller-reported failure (slip, unrecoverable, aborted rollout)
//   2  usage or configuration error

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "slipstep.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailed = 1;
constexpr int kExitUsage = 2;

int exit_code(slipstep_status st) {
    switch (st) {
        case SLIPSTEP_OK: return kExitOk;
        case SLIPSTEP_RUN_FAILED: return kExitRunFailed;
        default: return kExitUsage;  // bad input / precondition
    }
}

int complain(slipstep_status st) {
    std::fprintf(stderr, "error: %s\n", slipstep_last_error());
    return exit_code(st);
}

// "key=value" -> parts; missing '=' is a usage error handled by the caller
bool split_kv(const std::string& kv, std::string& key, std::string& value) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    key = kv.substr(0, eq);
    value = kv.substr(eq + 1);
    return true;
}

struct ScenarioHandle {
    slipstep_scenario* sc = nullptr;
    ~ScenarioHandle() { slipstep_scenario_free(sc); }
};

struct TraceHandle {
    slipstep_trace* tr = nullptr;
    ~TraceHandle() { slipstep_trace_free(tr); }
};

// config may be empty (library defaults), then overrides apply on top
slipstep_status open_scenario(const std::string& config,
                              const std::vector<std::string>& sets,
                              ScenarioHandle& h) {
    slipstep_status st = config.empty()
                             ? slipstep_scenario_parse("", &h.sc)
                             : slipstep_scenario_load(config.c_str(), &h.sc);
    if (st != SLIPSTEP_OK) return st;
    for (const auto& kv : sets) {
        std::string key, value;
        if (!split_kv(kv, key, value)) {
            std::fprintf(stderr, "error: override '%s' is not key=value\n",
                         kv.c_str());
            return SLIPSTEP_BAD_INPUT;
        }
        st = slipstep_scenario_set(h.sc, key.c_str(), value.c_str());
        if (st != SLIPSTEP_OK) return st;
    }
    return SLIPSTEP_OK;
}

void print_trace_brief(const slipstep_trace* tr) {
    std::printf("outcome          %s\n", slipstep_trace_outcome(tr));
    std::printf("steps            %d\n", slipstep_trace_steps(tr));
    std::printf("transient steps  %d\n", slipstep_trace_transient_steps(tr));
    std::printf("peak mu_r        %.6g\n", slipstep_trace_peak_mu_r(tr));
}

int cmd_run(const std::string& config, const std::vector<std::string>& sets,
            const std::string& out_prefix, bool force, bool quiet) {
    ScenarioHandle h;
    slipstep_status st = open_scenario(config, sets, h);
    if (st != SLIPSTEP_OK) return complain(st);

    TraceHandle t;
    st = slipstep_scenario_run(h.sc, &t.tr);
    if (st != SLIPSTEP_OK) return complain(st);

    std::string prefix = out_prefix;
    if (prefix.empty()) {
        prefix = config.empty()
                     ? "run_"
                     : std::filesystem::path(config).stem().string() + "_";
    }
    st = slipstep_trace_export(t.tr, prefix.c_str(), force ? 1 : 0);
    if (st != SLIPSTEP_OK) return complain(st);

    if (!quiet) {
        print_trace_brief(t.tr);
        std::printf("wrote            %strace.csv, %ssummary.txt\n",
                    prefix.c_str(), prefix.c_str());
    }
    const std::string outcome = slipstep_trace_outcome(t.tr);
    if (outcome == "slipped" || outcome == "unrecoverable") {
        std::fprintf(stderr, "error: run ended %s\n", outcome.c_str());
        return kExitRunFailed;
    }
    return kExitOk;
}

int cmd_regions(const std::string& config, const std::vector<std::string>& sets,
                double T, int grid, const std::string& out, bool force) {
    ScenarioHandle h;
    slipstep_status st = open_scenario(config, sets, h);
    if (st != SLIPSTEP_OK) return complain(st);

    slipstep_gait g;
    st = slipstep_scenario_gait(h.sc, &g);
    if (st != SLIPSTEP_OK) return complain(st);
    if (T <= 0.0) T = g.T_star;

    st = slipstep_export_regions(&g, T, grid, out.c_str(), force ? 1 : 0);
    if (st != SLIPSTEP_OK) return complain(st);

    slipstep_state fp;
    slipstep_regions reg;
    if (slipstep_fixed_point(&g, &fp) == SLIPSTEP_OK &&
        slipstep_classify(&g, fp, T, &reg) == SLIPSTEP_OK) {
        std::printf("wrote %s (T=%.6g, fixed point x=%.6g xd=%.6g, %s)\n",
                    out.c_str(), T, fp.x, fp.xd,
                    reg.in_S ? "inside the safe region"
                             : "OUTSIDE the safe region");
    }
    return kExitOk;
}

struct SweepRow {
    double value = 0.0;
    slipstep_status status = SLIPSTEP_OK;
    std::string error;
    std::string outcome;
    int steps = 0;
    int transients = 0;
    double peak_mu_r = 0.0;
};

int cmd_sweep(const std::string& config, const std::vector<std::string>& sets,
              const std::string& param, const std::vector<double>& values,
              const std::string& out, bool force) {
    if (param != "mu" && param != "h" && param != "L_star" &&
        param != "T_star") {
        std::fprintf(stderr,
                     "error: sweep parameter must be one of mu, h, L_star, "
                     "T_star (got '%s')\n",
                     param.c_str());
        return kExitUsage;
    }
    if (!out.empty() && !force && std::filesystem::exists(out)) {
        std::fprintf(stderr,
                     "error: refusing to overwrite existing '%s' (pass "
                     "--force)\n",
                     out.c_str());
        return kExitUsage;
    }

    std::vector<SweepRow> rows(values.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < values.size();) {
            SweepRow& row = rows[i];
            row.value = values[i];
            ScenarioHandle h;
            slipstep_status st = open_scenario(config, sets, h);
            if (st == SLIPSTEP_OK)
                st = slipstep_scenario_set(h.sc, param.c_str(),
                                           std::to_string(values[i]).c_str());
            TraceHandle t;
            if (st == SLIPSTEP_OK) st = slipstep_scenario_run(h.sc, &t.tr);
            row.status = st;
            if (st != SLIPSTEP_OK) {
                row.error = slipstep_last_error();  // thread-local, still ours
                continue;
            }
            row.outcome = slipstep_trace_outcome(t.tr);
            row.steps = slipstep_trace_steps(t.tr);
            row.transients = slipstep_trace_transient_steps(t.tr);
            row.peak_mu_r = slipstep_trace_peak_mu_r(t.tr);
        }
    };
    const size_t n_threads =
        std::min<size_t>(values.size(),
                         std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::printf("%-10s %-14s %6s %10s %10s\n", param.c_str(), "outcome",
                "steps", "transient", "peak_mu_r");
    for (const SweepRow& r : rows) {
        if (r.status != SLIPSTEP_OK)
            std::printf("%-10.6g error: %s\n", r.value, r.error.c_str());
        else
            std::printf("%-10.6g %-14s %6d %10d %10.6g\n", r.value,
                        r.outcome.c_str(), r.steps, r.transients, r.peak_mu_r);
    }

    if (!out.empty()) {
        std::FILE* f = std::fopen(out.c_str(), "w");
        if (!f) {
            std::fprintf(stderr, "error: cannot write '%s'\n", out.c_str());
            return kExitRunFailed;
        }
        std::fprintf(f, "%s,outcome,steps,transient_steps,peak_mu_r\n",
                     param.c_str());
        for (const SweepRow& r : rows) {
            if (r.status != SLIPSTEP_OK)
                std::fprintf(f, "%.17g,error,,,\n", r.value);
            else
                std::fprintf(f, "%.17g,%s,%d,%d,%.17g\n", r.value,
                             r.outcome.c_str(), r.steps, r.transients,
                             r.peak_mu_r);
        }
        std::fclose(f);
        std::printf("wrote %s\n", out.c_str());
    }

    for (const SweepRow& r : rows) {
        if (r.status != SLIPSTEP_OK)
            return r.status == SLIPSTEP_RUN_FAILED ? kExitRunFailed
                                                   : kExitUsage;
    }
    return kExitOk;
}

int cmd_accept(const std::string& filter) {
    int n_failed = 0;
    auto on_check = [](const char* line, void*) {
        std::printf("%s\n", line);
        std::fflush(stdout);
    };
    const slipstep_status st =
        slipstep_run_checks(filter.c_str(), on_check, nullptr, &n_failed);
    if (st != SLIPSTEP_OK) return complain(st);
    if (n_failed > 0) {
        std::printf("%d check%s FAILED\n", n_failed, n_failed == 1 ? "" : "s");
        return kExitRunFailed;
    }
    std::printf("all checks passed\n");
    return kExitOk;
}

int cmd_plan6dof(const std::string& config,
                 const std::vector<std::string>& sets,
                 const std::string& joint_log, bool force) {
    slipstep_biped* sc = nullptr;
    slipstep_status st = slipstep_biped_load(config.c_str(), &sc);
    if (st != SLIPSTEP_OK) return complain(st);
    for (const auto& kv : sets) {
        std::string key, value;
        if (!split_kv(kv, key, value)) {
            std::fprintf(stderr, "error: override '%s' is not key=value\n",
                         kv.c_str());
            slipstep_biped_free(sc);
            return kExitUsage;
        }
        st = slipstep_biped_set(sc, key.c_str(), value.c_str());
        if (st != SLIPSTEP_OK) {
            slipstep_biped_free(sc);
            return complain(st);
        }
    }

    slipstep_rollout* r = nullptr;
    st = slipstep_biped_run(sc, joint_log.empty() ? nullptr : joint_log.c_str(),
                            force ? 1 : 0, &r);
    slipstep_biped_free(sc);
    if (st != SLIPSTEP_OK) return complain(st);

    std::printf("%s", slipstep_rollout_format(r));
    if (!joint_log.empty()) std::printf("wrote %s\n", joint_log.c_str());
    const bool completed =
        std::string(slipstep_rollout_outcome(r)) == "completed";
    if (!completed)
        std::fprintf(stderr, "error: rollout ended %s: %s\n",
                     slipstep_rollout_outcome(r), slipstep_rollout_detail(r));
    slipstep_rollout_free(r);
    return completed ? kExitOk : kExitRunFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Slip-aware footstep control: point-mass stepping simulation, "
        "friction-safety region analysis, and a planar six-joint biped "
        "rollout."};
    app.require_subcommand(1);
    app.set_version_flag("--version", [] {
        return std::string("slipstep ") + slipstep_version();
    }());
    app.failure_message(CLI::FailureMessage::help);

    std::string config, prefix, param, filter, joint_log;
    std::string regions_out = "regions.csv", sweep_out;
    std::vector<std::string> sets;
    std::vector<double> values;
    double T = 0.0;
    int grid = 200;
    bool force = false, quiet = false;

    auto add_sets = [&](CLI::App* cmd) {
        cmd->add_option("-s,--set", sets,
                        "Override a config key, e.g. -s mu=0.25 (repeatable)");
    };

    CLI::App* run = app.add_subcommand(
        "run", "Run a stepping scenario and write trace + summary files");
    run->add_option("config", config,
                    "Scenario file (key = value lines); omit for defaults")
        ->option_text("FILE");
    add_sets(run);
    run->add_option("-o,--out", prefix,
                    "Output file prefix (default: config stem + '_')");
    run->add_flag("-f,--force", force, "Overwrite existing output files");
    run->add_flag("-q,--quiet", quiet, "Suppress the stdout summary");

    CLI::App* regions = app.add_subcommand(
        "regions", "Export safety-region boundaries as CSV polylines");
    regions->add_option("config", config, "Scenario file supplying the gait")
        ->option_text("FILE");
    add_sets(regions);
    regions->add_option("-T,--duration", T,
                        "Step duration to classify against (default: T_star)");
    regions->add_option("-n,--grid", grid, "Points per boundary branch")
        ->capture_default_str();
    regions->add_option("-o,--out", regions_out, "Output CSV path")
        ->capture_default_str();
    regions->add_flag("-f,--force", force, "Overwrite an existing file");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run one scenario across several values of a gait parameter");
    sweep->add_option("config", config, "Scenario file; omit for defaults")
        ->option_text("FILE");
    add_sets(sweep);
    sweep->add_option("-p,--param", param, "Swept key: mu, h, L_star, T_star")
        ->required();
    sweep->add_option("-v,--values", values, "Values, e.g. -v 0.21,0.4,1.5")
        ->required()
        ->delimiter(',');
    sweep->add_option("-o,--out", sweep_out, "Also write the table as CSV");
    sweep->add_flag("-f,--force", force, "Overwrite an existing file");

    CLI::App* accept = app.add_subcommand(
        "accept", "Run the built-in verification suite");
    accept->add_option("-k,--filter", filter,
                       "Only checks whose name contains this substring");

    CLI::App* plan = app.add_subcommand(
        "plan6dof", "Closed-loop rollout on the planar six-joint biped");
    plan->add_option("config", config, "Biped scenario file")
        ->required()
        ->option_text("FILE");
    add_sets(plan);
    plan->add_option("-j,--joint-log", joint_log,
                     "Write per-sample joint/contact CSV here");
    plan->add_flag("-f,--force", force, "Overwrite an existing log file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (run->parsed()) return cmd_run(config, sets, prefix, force, quiet);
    if (regions->parsed())
        return cmd_regions(config, sets, T, grid, regions_out, force);
    if (sweep->parsed())
        return cmd_sweep(config, sets, param, values, sweep_out, force);
    if (accept->parsed()) return cmd_accept(filter);
    if (plan->parsed()) return cmd_plan6dof(config, sets, joint_log, force);
    return kExitUsage;
}
