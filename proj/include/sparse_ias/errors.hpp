#pragma once

#include <stdexcept>
#include <string>

namespace sias {

// Vector or operator dimensions do not line up.
class SizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain (non-finite entries, nonpositive widths, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Hyperparameter set outside the admissible region.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A dictionary column that the data cannot see (zero sensitivity).
class DegenerateColumnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No atom survived the activity threshold, so no label can be assigned.
class ClassificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sias
