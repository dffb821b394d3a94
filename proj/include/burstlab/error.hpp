#pragma once

#include <stdexcept>
#include <string>

namespace burstlab {

/// Argument outside the mathematical domain of an operation (x at a boundary, y <= 0, nu <= -1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameter or configuration set violates a stated constraint.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integration or sampling produced a non-finite value, or a rate overflowed.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Estimator was handed too little data to produce a result.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

inline void require_domain(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace burstlab
