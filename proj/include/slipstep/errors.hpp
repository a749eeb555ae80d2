#pragma once

#include <stdexcept>
#include <string>

namespace slipstep {

// Thrown when an operation is called on a state/configuration that violates
// its documented precondition (e.g. asking for a recovery window from a state
// that is not in the critical region). Distinct from invalid_argument, which
// is reserved for malformed inputs (negative mass, NaN, unknown config key).
class precondition_error : public std::logic_error {
public:
    explicit precondition_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace slipstep
