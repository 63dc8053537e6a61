#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace imprint {

struct NelderMeadOptions {
  double initial_step = 0.25;
  double f_tolerance = 1e-10;  // relative spread of vertex values
  double x_tolerance = 1e-6;   // simplex diameter (infinity norm)
  std::size_t max_evaluations = 4000;
  int restarts = 1;            // fresh simplex around the best point
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Derivative-free minimization. Non-finite objective values are treated as
// +infinity, which is how callers encode infeasible points. The starting
// point is a vertex of the first simplex and ties never displace it, so the
// result is never worse than the start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace imprint
