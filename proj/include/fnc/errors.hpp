#pragma once

#include <stdexcept>
#include <string>

namespace fnc {

// Thrown when an iterative routine (quadrature, root solve) fails to meet its
// tolerance within the iteration budget. Never returned as a silent value.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double best_value, double residual)
        : std::runtime_error(what), best_value_(best_value), residual_(residual) {}

    // Best approximation found before giving up.
    double best_value() const noexcept { return best_value_; }
    // Residual (or error estimate) at that approximation.
    double residual() const noexcept { return residual_; }

private:
    double best_value_;
    double residual_;
};

}  // namespace fnc
