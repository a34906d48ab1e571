#pragma once

#include <stdexcept>
#include <string>

namespace ssa {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    ok = 0,
    configuration = 2,
    runtime = 3,
    incomplete_input = 4,
};

// Invalid parameters, manifests, or files supplied by the user.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A function was called with arguments outside its contract.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite arithmetic inside an optimizer run.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A results directory lacks records needed by the requested analysis.
class IncompleteInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssa
