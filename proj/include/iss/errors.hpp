#pragma once

#include <stdexcept>
#include <string>

namespace iss {

// Caller passed something structurally invalid (dimension mismatch, bad range, ...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Input files / tabular data are malformed.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A statistic is mathematically undefined on the given data (empty group, no usable strata).
class UndefinedResultError : public std::runtime_error {
public:
    explicit UndefinedResultError(const std::string& what) : std::runtime_error(what) {}
};

// Root-finding target cannot be reached; carries the best attainable value.
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double attainable)
        : std::runtime_error(what), max_attainable(attainable) {}
    double max_attainable;
};

}  // namespace iss
