// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fadebound {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
    invalid_input,  // precondition or configuration violation
    numeric,        // root not bracketed, non-finite result, ...
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& what) {
    throw Error(ErrorKind::invalid_input, what);
}

[[noreturn]] inline void fail_numeric(const std::string& what) {
    throw Error(ErrorKind::numeric, what);
}

}  // namespace fadebound
