#pragma once

#include <stdexcept>

namespace bucksim {

// Bad or missing user input: config keys, flag values, non-positive parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A well-formed request outside the model's domain (violated parameter
// inequalities, states outside [0, x_ref], times outside the horizon).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Something that valid inputs should never produce.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace bucksim
