#pragma once
#include <limits>
#include <stdexcept>
#include <string>

namespace qhgeo {

// Malformed caller input: bad file, malformed domain spec, out-of-range argument.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine stalled before reaching its target accuracy.
struct ConvergenceError : std::runtime_error {
    double best_residual;
    explicit ConvergenceError(const std::string& what,
                              double residual = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), best_residual(residual) {}
};

// The requested resolution cannot represent the configuration,
// e.g. a grid too coarse for the clearance at an endpoint.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qhgeo
