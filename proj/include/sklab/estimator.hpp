#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sklab/matrix.hpp"

namespace sklab {

// Scaling ran into the iteration cap before reaching the accuracy the
// estimator needs; callers map this to its own exit code.
struct IterationCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PermanentEstimate {
  double estimate = 0.0;      // exp(log_estimate); may overflow for large n
  double log_estimate = 0.0;  // natural log, always finite for per > 0
  long long samples = 0;
  double rel_half_width = 0.0;  // 95% CI half width over the point estimate
  double scaled_max_deviation = 0.0;
  std::string method;
};

// Importance-sampling estimate of the permanent of a 0-1 matrix whose rows
// and columns each have more than n/2 ones.  The matrix is first scaled to
// near doubly stochastic form; samples are then drawn column by column with
// probabilities proportional to the scaled entries.  Throws
// std::invalid_argument when the preconditions fail.
PermanentEstimate estimate_permanent(const Matrix& A, double eps, double delta,
                                     std::uint64_t seed);

}  // namespace sklab
