#pragma once

#include <stdexcept>
#include <string>

namespace qretro {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
   public:
    using Error::Error;
};

class NotHermitian : public Error {
   public:
    using Error::Error;
};

class NotPSD : public Error {
   public:
    using Error::Error;
};

class NotUnital : public Error {
   public:
    using Error::Error;
};

class NotCPTP : public Error {
   public:
    using Error::Error;
};

/// A channel produced an output outside the Bloch ball.
class InternalCPViolation : public Error {
   public:
    using Error::Error;
};

/// S = sum lambda_i^2 r_i^2 is too close to 1 for the closed-form inverse.
class SingularS : public Error {
   public:
    using Error::Error;
};

/// Some |lambda_i| reached 1; the unscathed decision path must be used instead.
class EigenvalueOnBoundary : public Error {
   public:
    using Error::Error;
};

/// {M (x) 1, X} = B has no solution because a forbidden block of B is nonzero.
class RankDeficient : public Error {
   public:
    using Error::Error;
};

class DomainError : public Error {
   public:
    using Error::Error;
};

}  // namespace qretro
