// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace famlens {

/// Error taxonomy mapped onto CLI exit codes:
/// usage/config -> 1, backend -> 2, validation -> 3.
enum class ErrorKind {
    usage,
    config,
    backend,
    validation,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    static Error usage(std::string msg) { return Error(ErrorKind::usage, std::move(msg)); }
    static Error config(std::string msg) { return Error(ErrorKind::config, std::move(msg)); }
    static Error backend(std::string msg) { return Error(ErrorKind::backend, std::move(msg)); }
    static Error validation(std::string msg) { return Error(ErrorKind::validation, std::move(msg)); }

private:
    ErrorKind kind_;
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::config:
        return 1;
    case ErrorKind::backend:
        return 2;
    case ErrorKind::validation:
        return 3;
    }
    return 1;
}

} // namespace famlens
