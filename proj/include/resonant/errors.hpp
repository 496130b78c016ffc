#pragma once

#include <stdexcept>
#include <string>

namespace resonant {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied an argument that violates a documented precondition.
/// The CLI maps this family to exit code 2.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class OutOfBounds : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class EmptyMix : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Dominant eigenvalue estimate of the adjacency matrix is zero.
class SingularSpectrum : public Error {
public:
    using Error::Error;
};

/// A hidden state or prediction became NaN/Inf.
class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// Regularized Gram matrix could not be factorized.
class IllConditioned : public Error {
public:
    IllConditioned(const std::string& what, double rcond)
        : Error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class ZeroNormTarget : public Error {
public:
    using Error::Error;
};

/// Inverse output activation received a value on or outside its range.
class OutOfRange : public Error {
public:
    using Error::Error;
};

class DegenerateData : public Error {
public:
    using Error::Error;
};

}  // namespace resonant
