#pragma once

// Release gate for the whole stack: one self-contained check per core
// claim, each with its stated tolerance baked in. Deterministic (fixed
// seeds), no file or network I/O; a check either passes or reports the
// measured number that broke it.

#include <functional>
#include <string>
#include <vector>

namespace slipstep {

struct AcceptanceCheck {
    std::string name;
    bool passed = false;
    std::string detail;   // measured margins, one line
    double seconds = 0.0;
};

// Runs the checks whose name contains `filter` (all when empty), in fixed
// order, calling on_done after each. A thrown exception inside a check is
// caught and reported as a failure of that check.
std::vector<AcceptanceCheck> run_acceptance(
    const std::string& filter = "",
    const std::function<void(const AcceptanceCheck&)>& on_done = {});

bool acceptance_passed(const std::vector<AcceptanceCheck>& checks);

// One "PASS name  1.23s  detail" line (no trailing newline).
std::string format_check(const AcceptanceCheck& c);

// format_check per line plus a one-line verdict.
std::string format_acceptance(const std::vector<AcceptanceCheck>& checks);

} // namespace slipstep
