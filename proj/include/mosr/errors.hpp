#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mosr {

// Precondition / shape-contract violations. Thrown with a message naming
// the offending shapes or values.
class contract_error : public std::invalid_argument {
public:
    explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failures (e.g. SVD sweep cap exceeded).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed files: bad magic, version, truncation.
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Optimization produced a non-finite loss. Carries the step at which
// divergence was detected.
class training_error : public std::runtime_error {
public:
    training_error(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

}  // namespace mosr
