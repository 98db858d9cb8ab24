#pragma once

#include <stdexcept>
#include <string>

namespace hpvem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input (bad counts, unsupported kinds, out-of-range parameters).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Mesh topology violations, e.g. an edge shared by three cells.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Geometric failures: empty kernel, degenerate cells, failed Voronoi clipping.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Numerically singular Gram or projector systems.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Coefficient field could not be evaluated or violates its bounds.
class CoefficientError : public Error {
public:
    using Error::Error;
};

/// Mismatch between a degree map and the layouts built from it.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Factorization of the shifted operator failed.
class ShiftError : public Error {
public:
    using Error::Error;
};

/// Eigensolver did not reach the requested residual.
class IterationError : public Error {
public:
    using Error::Error;
};

/// Not enough computed eigenvalues to cover a reference list.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Rate fit without enough usable points.
class FitError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A required reference data file is missing or malformed.
class IngestionError : public IoError {
public:
    using IoError::IoError;
};

/// Process exit code for an error, as used by the command-line tool:
/// 2 argument error, 3 numerical failure, 4 io error.
int exit_code_for(const Error& e);

} // namespace hpvem
