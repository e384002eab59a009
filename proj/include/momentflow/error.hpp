#pragma once

#include <stdexcept>
#include <string>

namespace momentflow {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed inputs: mismatched dimensions, empty bases.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Inputs outside the domain of a map (non positive-definite matrices,
// elements that do not normalize the Lie algebra).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Raised by analysis routines when the data cannot support the requested fit.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

class NumericalDegeneracyError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class NotAsymptoticError : public Error {
 public:
  using Error::Error;
};

}  // namespace momentflow
