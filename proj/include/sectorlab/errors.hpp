#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sectorlab {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed value left the representable range (overflow, NaN).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// An iterative method stopped before meeting its tolerance. Carries the
/// best residual reached and the per-iteration trace for diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, std::vector<double> trace = {})
        : std::runtime_error(what), residual_(residual), trace_(std::move(trace)) {}

    double residual() const noexcept { return residual_; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    double residual_;
    std::vector<double> trace_;
};

/// Malformed input file or configuration.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sectorlab
