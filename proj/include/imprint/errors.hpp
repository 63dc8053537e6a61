#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace imprint {

// Base of every error raised by the library. Callers that only need a message
// can catch this; the subclasses carry the structured context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PenetranceOverflow : public Error {
 public:
  PenetranceOverflow(int trio_index, double value);
  int trio_index() const { return trio_index_; }
  double value() const { return value_; }

 private:
  int trio_index_;
  double value_;
};

class DegenerateDenominator : public Error {
 public:
  explicit DegenerateDenominator(double prevalence);
};

class LogOfZero : public Error {
 public:
  LogOfZero(int trio_index, long count, const std::string& term);
  int trio_index() const { return trio_index_; }
  long count() const { return count_; }

 private:
  int trio_index_;
  long count_;
};

class OptimizerFailure : public Error {
 public:
  OptimizerFailure(const std::string& what, std::array<double, 6> best, double best_value);
  const std::array<double, 6>& best_point() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  std::array<double, 6> best_;
  double best_value_;
};

class DegenerateSamples : public Error {
 public:
  using Error::Error;
};

class CalibrationInfeasible : public Error {
 public:
  using Error::Error;
};

class MismatchedData : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure inside an EM iteration (or test arm) with its context.
class FitError : public Error {
 public:
  FitError(const std::string& context, const std::string& what) : Error(context + ": " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace imprint
