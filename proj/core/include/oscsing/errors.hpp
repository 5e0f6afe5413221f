#pragma once

#include <stdexcept>
#include <string>

namespace oscsing {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a map (e.g. t <= 0 for a phase).
class DomainError : public Error {
 public:
  using Error::Error;
};

// No (epsilon, A) pair on the search grid satisfies the growth condition.
class NoWitness : public Error {
 public:
  using Error::Error;
};

// A growth witness that violates 2 <= A^l < 4 or a = 5 (1 + epsilon)^l.
class InvalidWitness : public Error {
 public:
  using Error::Error;
};

// Quadrature ran out of panels before meeting its tolerance.
class NotConverged : public Error {
 public:
  using Error::Error;
};

// The requested scale range leaves part of the open set uncovered.
class CoverageGap : public Error {
 public:
  using Error::Error;
};

// Grid spacing too large for the requested discretisation.
class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

// A cover would contain more intervals than the caller allowed.
class TooManyIntervals : public Error {
 public:
  using Error::Error;
};

}  // namespace oscsing
