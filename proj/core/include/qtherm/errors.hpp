#pragma once

#include <stdexcept>
#include <string>

namespace qtherm {

/// Configuration or input that the library cannot handle (bad dimensions,
/// infeasible targets, violated gap restrictions). Maps to CLI exit code 2.
struct UnsupportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A check that should hold by construction failed (e.g. an LP that a theorem
/// guarantees feasible came back infeasible). Maps to CLI exit code 3.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Majorization precondition violated; carries the first violated prefix index.
struct MajorizationError : UnsupportedError {
    int violated_prefix;
    explicit MajorizationError(int prefix)
        : UnsupportedError("majorization precondition violated at prefix index " +
                           std::to_string(prefix)),
          violated_prefix(prefix) {}
};

} // namespace qtherm
