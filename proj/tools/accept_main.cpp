// Release-gate runner: one line per check as it finishes, nonzero exit on
// any failure. Optional argument filters checks by name substring.

#include <cstdio>
#include <string>

#include "slipstep/acceptance.hpp"

int main(int argc, char** argv) {
    const std::string filter = argc > 1 ? argv[1] : "";
    int passed = 0, total = 0;
    const auto checks = slipstep::run_acceptance(
        filter, [&](const slipstep::AcceptanceCheck& c) {
            std::printf("%s\n", slipstep::format_check(c).c_str());
            std::fflush(stdout);
            passed += c.passed;
            ++total;
        });
    if (total == 0) {
        std::fprintf(stderr, "no check matches '%s'\n", filter.c_str());
        return 2;
    }
    std::printf("%d of %d checks passed\n", passed, total);
    return slipstep::acceptance_passed(checks) ? 0 : 1;
}
