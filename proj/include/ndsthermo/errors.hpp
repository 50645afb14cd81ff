// errors.hpp — error taxonomy shared by all modules
#pragma once

#include <stdexcept>
#include <string>

namespace ndsthermo {

// Bad argument, violated precondition, or malformed configuration.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mixing points/potentials with the wrong phase space.
struct SpaceMismatchError : ParameterError {
    using ParameterError::ParameterError;
};

// A table schedule was asked for a map beyond its horizon.
struct ScheduleExhaustedError : std::runtime_error {
    explicit ScheduleExhaustedError(long long index)
        : std::runtime_error("schedule exhausted: no map at time index " + std::to_string(index)),
          index(index) {}
    long long index;
};

// A symbolic operation needed letters beyond the truncation depth.
struct DepthExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An inverse branch could not be continued within the injectivity radius.
struct BranchDomainError : std::runtime_error {
    BranchDomainError(const std::string& what, long long step)
        : std::runtime_error(what), step(step) {}
    long long step;
};

// Root finders, overflow guards, non-convergence.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A constructive search (exactness / specification) failed.
struct ConstructionError : std::runtime_error {
    ConstructionError(const std::string& what, long long gap_index)
        : std::runtime_error(what), gap_index(gap_index) {}
    long long gap_index;
};

}  // namespace ndsthermo
