#pragma once

#include <stdexcept>
#include <string>

namespace intopt {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed problem data: mismatched dimensions, bad field values.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& what) : Error(what) {}
};

/// Constraint system is provably inconsistent.
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error(what) {}
};

/// Constraint matrix lost full row rank and presolve could not repair it.
class RankDeficientError : public Error {
public:
    explicit RankDeficientError(const std::string& what) : Error(what) {}
};

/// A linear-algebra kernel failed beyond recovery (factorization breakdown,
/// non-finite values).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace intopt
