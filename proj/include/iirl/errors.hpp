#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iirl {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between containers that must agree.
struct ShapeError : Error {
    using Error::Error;
};

/// An argument violates a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

/// A requested enumeration exceeds the configured cap.
struct CapacityError : Error {
    using Error::Error;
};

/// Numerical failure inside the LP solver (singular basis etc.).
struct SolverError : Error {
    using Error::Error;
};

/// The feasible region degenerated to constant rewards only.
struct DegenerateRegionError : Error {
    using Error::Error;
};

/// An iterative scheme failed to converge. Carries the last iterates
/// so callers can inspect how far the computation got.
struct ConvergenceError : Error {
    std::vector<double> value;
    std::vector<double> belief_value;

    ConvergenceError(const std::string& msg, std::vector<double> v,
                     std::vector<double> vhat)
        : Error(msg), value(std::move(v)), belief_value(std::move(vhat)) {}
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace iirl
