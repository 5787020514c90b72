#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates an invariant: malformed files, degenerate classes,
/// empty filter results.
class DataError : public Error {
public:
    using Error::Error;
};

/// A parameter lies outside an operation's domain (sigma <= 0, k > count, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Non-fatal conditions collected while an operation runs.
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
    if (diag != nullptr) {
        diag->warn(std::move(message));
    }
}

}  // namespace pnet
