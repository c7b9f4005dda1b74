#pragma once

#include <stdexcept>
#include <string>

namespace chaosmm {

/// Invalid parameters or arguments; raised before any computation starts.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation needs v = u/x while the price sits at (or too close to) zero.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NoPeakError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling could not hit the energy window.
class SamplingExhaustedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace chaosmm
