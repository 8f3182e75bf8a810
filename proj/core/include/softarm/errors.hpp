#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softarm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct InvalidStep : Error {
    using Error::Error;
};

struct ConstitutiveSingularity : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    NonConvergence(const std::string& what, double best_residual)
        : Error(what), best_residual(best_residual) {}
    double best_residual;
};

struct OutOfBranch : Error {
    using Error::Error;
};

struct InvalidGain : Error {
    using Error::Error;
};

struct DivisionError : Error {
    using Error::Error;
};

// Configuration or log schema violation. `field` names the offending key or
// column; `row` is the 1-based data row for logs, 0 when not applicable.
struct ConfigError : Error {
    ConfigError(const std::string& what, std::string field = {}, std::size_t row = 0)
        : Error(what), field(std::move(field)), row(row) {}
    std::string field;
    std::size_t row;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace softarm
