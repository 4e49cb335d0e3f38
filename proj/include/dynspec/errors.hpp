#pragma once

#include <stdexcept>
#include <string>

namespace dynspec {

/// Input outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A run would need more pulls than it is allowed to make.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or inconsistent recorded data (reward buffers, fixtures).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dynspec
