#pragma once

#include <stdexcept>
#include <string>

namespace upsr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative dof, p outside (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative method failed: unbracketed root, non-monotone series, exhausted iterations.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The data cannot support the statistic, e.g. zero sample variance.
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

/// Design matrix is rank deficient under the singular value tolerance.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

/// Hyperparameters do not describe a proper distribution for the requested operation.
class ImproperPosteriorError : public Error {
public:
    using Error::Error;
};

/// Malformed simulation plan or unknown procedure.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace upsr
