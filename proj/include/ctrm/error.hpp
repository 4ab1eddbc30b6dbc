#ifndef CTRM_ERROR_HPP
#define CTRM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ctrm {

/// Argument outside the mathematical domain of an operation (t <= 0, wait <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation requested for a model family that does not provide it.
class UnsupportedModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A finite path was queried past its last renewal epoch.
class PathExhausted : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Numerical breakdown: inconsistent inversion orders, out-of-range CDF, non-finite transform.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ctrm

#endif
