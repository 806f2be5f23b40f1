#ifndef RINGSWARM_ERRORS_HPP
#define RINGSWARM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ringswarm {

struct InvalidDistribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedDistribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegeneratePopulation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UndefinedThreshold : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a non-finite value shows up mid-integration.
struct DivergedIntegration : std::runtime_error {
    DivergedIntegration(std::size_t step_index, const std::string& what)
        : std::runtime_error(what), step(step_index) {}
    std::size_t step;
};

} // namespace ringswarm

#endif
