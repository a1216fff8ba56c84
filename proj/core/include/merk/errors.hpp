#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace merk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad sizes, empty grids, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Internal scheduling inconsistency: a polynomial references a stage that
/// has not been computed yet.
class SchedulingBug : public Error {
 public:
  using Error::Error;
};

class ProblemEvaluationDiverged : public Error {
 public:
  ProblemEvaluationDiverged(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class FastSolveDiverged : public Error {
 public:
  FastSolveDiverged(const std::string& what, double tau)
      : Error(what), tau_(tau) {}
  double tau() const { return tau_; }

 private:
  double tau_;
};

/// Dense oracle routines refuse problems above the oracle scale or without a
/// dense linear operator.
class OracleScaleExceeded : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A harness run failed; the message names the method, problem and H.
class RunFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace merk
