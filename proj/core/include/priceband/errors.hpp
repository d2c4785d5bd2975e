#ifndef PRICEBAND_ERRORS_HPP
#define PRICEBAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace priceband {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter violates its admissible range; the message names the bound.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function (e.g. xi(y) with y <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The intervention cost is at or above the largest admissible cost c_bar.
class CostTooLargeError : public Error {
public:
    CostTooLargeError(double cost, double cost_limit)
        : Error("intervention cost " + std::to_string(cost) +
                " is not below the admissible threshold c_bar = " + std::to_string(cost_limit)),
          cost(cost),
          cost_limit(cost_limit) {}

    double cost;
    double cost_limit;
};

/// Evaluation grid violates a checker precondition (contains a pasting
/// boundary, lies outside the admissible domain, or is not ordered).
class GridError : public Error {
public:
    using Error::Error;
};

/// Simulation configuration or runtime guard failure.
class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace priceband

#endif
