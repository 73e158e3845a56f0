#pragma once

#include <stdexcept>
#include <string>

namespace genfrac {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidDomainError : public Error {
public:
    using Error::Error;
};

class QuadratureFailureError : public Error {
public:
    using Error::Error;
};

class NotIntegrableError : public Error {
public:
    using Error::Error;
};

class NotSquareIntegrableError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class TruncationFailureError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class NumericalOverflowError : public Error {
public:
    using Error::Error;
};

class DerivativeBlowupError : public Error {
public:
    using Error::Error;
};

class HypothesisViolationError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ModeError : public Error {
public:
    using Error::Error;
};

class AbnormalCaseError : public Error {
public:
    using Error::Error;
};

class InconsistentDataError : public Error {
public:
    using Error::Error;
};

class NonInvertibleError : public Error {
public:
    using Error::Error;
};

class StalledError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace genfrac
