#pragma once

#include <stdexcept>
#include <string>

namespace sentry {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data. The CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration. The CLI maps these to exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

// ingestion
class FieldCountError : public DataError {
public:
    using DataError::DataError;
};
class NumericParseError : public DataError {
public:
    using DataError::DataError;
};
class UnknownCategoryError : public DataError {
public:
    using DataError::DataError;
};
class UnknownLabelError : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};
class EmptyTrainingSetError : public Error {
public:
    using Error::Error;
};
class UnfittedModelError : public Error {
public:
    using Error::Error;
};

// topology
class NonPositiveRssiError : public Error {
public:
    using Error::Error;
};
class InsufficientNodesError : public Error {
public:
    using Error::Error;
};
class EmptyClusterError : public Error {
public:
    using Error::Error;
};
class RangeError : public Error {
public:
    using Error::Error;
};

// rbm
class TooLargeError : public Error {
public:
    using Error::Error;
};

// rl
class UnfittedSpecError : public Error {
public:
    using Error::Error;
};
class NonStochasticTransitionError : public Error {
public:
    using Error::Error;
};

// metrics
class EmptyCountsError : public Error {
public:
    using Error::Error;
};
class NoPositiveVerdictsError : public Error {
public:
    using Error::Error;
};
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};
class SingleClassError : public Error {
public:
    using Error::Error;
};

} // namespace sentry
