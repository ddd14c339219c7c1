#pragma once

#include <stdexcept>
#include <string>

namespace pom {

// Mathematically undefined input (zero benchmark, degenerate normalization).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller broke an operation's precondition.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Out-of-range configuration value.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An experiment produced nothing usable (e.g. zero converged epochs).
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pom
