#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Design parameters that cannot be realised (bad ranges, indefinite support Gram,
// coherence bounds that the construction cannot meet).
class InfeasibleParams : public Error {
 public:
  using Error::Error;
};

// Filler columns could not be drawn within the coherence bound.
class RejectionBudgetExhausted : public Error {
 public:
  using Error::Error;
};

// The support Gram matrix has smallest eigenvalue at or below the singularity floor.
class SingularSupportGram : public Error {
 public:
  using Error::Error;
};

class SingularLeastSquares : public Error {
 public:
  using Error::Error;
};

// Best-subset enumeration would exceed the subset budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class EmptyCell : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparselab
