#pragma once

#include <stdexcept>
#include <string>

namespace amplab {

struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite value or failed numeric procedure; carries the AMP iteration
// index when raised inside the engine (-1 otherwise).
struct numeric_failure : std::runtime_error {
    int iteration = -1;
    explicit numeric_failure(const std::string& what, int iter = -1)
        : std::runtime_error(what), iteration(iter) {}
};

// Huber calibration could not bracket a solution; carries the last bracket.
struct calibration_failure : std::runtime_error {
    double b_lo = 0.0;
    double b_hi = 0.0;
    calibration_failure(const std::string& what, double lo, double hi)
        : std::runtime_error(what), b_lo(lo), b_hi(hi) {}
};

struct degenerate_direction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace amplab
