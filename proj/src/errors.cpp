#include "imprint/errors.hpp"

namespace imprint {

PenetranceOverflow::PenetranceOverflow(int trio_index, double value)
    : Error("penetrance " + std::to_string(value) + " exceeds 1 for trio type " +
            std::to_string(trio_index)),
      trio_index_(trio_index),
      value_(value) {}

DegenerateDenominator::DegenerateDenominator(double prevalence)
    : Error("disease prevalence " + std::to_string(prevalence) +
            " is degenerate; conditional trio probabilities need it in (0,1)") {}

LogOfZero::LogOfZero(int trio_index, long count, const std::string& term)
    : Error("log of zero probability: trio type " + std::to_string(trio_index) + " has " +
            std::to_string(count) + " " + term + " observation(s) with probability 0"),
      trio_index_(trio_index),
      count_(count) {}

OptimizerFailure::OptimizerFailure(const std::string& what, std::array<double, 6> best,
                                   double best_value)
    : Error(what), best_(best), best_value_(best_value) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace imprint
