#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wristband {

/// Argument outside the mathematical domain of a function (negative shape, p = 0, NaN, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a shape or precondition contract.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The spectral path is only defined for d >= 3.
class UnsupportedDimension : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed batch / table / report file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loss became NaN/Inf during optimization.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace wristband
