#pragma once

#include <stdexcept>
#include <string>

namespace frob {

// Error categories map onto CLI exit codes: input -> 2, precondition -> 3,
// verification -> 4. Budget and internal failures also exit nonzero.
enum class ErrorKind {
    input,
    precondition,
    verification,
    budget,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::input, msg); }
[[noreturn]] inline void fail_precondition(const std::string& msg) { throw Error(ErrorKind::precondition, msg); }
[[noreturn]] inline void fail_verification(const std::string& msg) { throw Error(ErrorKind::verification, msg); }
[[noreturn]] inline void fail_budget(const std::string& msg) { throw Error(ErrorKind::budget, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { throw Error(ErrorKind::internal, msg); }

} // namespace frob
