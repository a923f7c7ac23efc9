#pragma once

#include <stdexcept>
#include <string>

namespace advda {

// Shape or value contract violated by a caller (dimension mismatch, bad label).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A metric is undefined for the given input (single-class AUROC, constant kappa raters).
class UndefinedMetric : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or unusable data file.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration or CLI arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace advda
