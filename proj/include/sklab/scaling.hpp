// Alternate row/column normalization with the iterate indexing used
// throughout: A^(0) is the row-normalized input, odd k comes from a column
// pass, even k from a row pass. Scaling vectors are kept in log domain.
#pragma once

#include "sklab/matrix.hpp"

#include <functional>

namespace sklab {

enum class Norm { L1, L2 };

enum class ScaleStatus { Converged, IterationCapReached, NotScalableWarning };

const char* to_string(ScaleStatus s);

// Raised when the input cannot be scaled at all (zero row or zero column).
struct NotScalableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceRow {
  long long k = 0;
  // Side standardized at step k: 'r' for even k (rows), 'c' for odd k.
  char side = 'r';
  double l1_row = 0, l1_col = 0, l2_row = 0, l2_col = 0;
  double max_row = 0, min_row = 0, max_col = 0, min_col = 0;
  // Product of the currently non-standardized side's sums (columns at even k,
  // rows at odd k); <= 1 up to rounding for any iterate.
  double prod_sums = 0;
  double log_prod_sums = 0;  // same value in log domain (not in the CSV)
};

struct ScalingTrace {
  std::vector<TraceRow> rows;
  long long stride = 1;  // rows recorded at k % stride == 0
};

struct ScalingState {
  long long k = 0;
  Matrix current;              // A^(k)
  Matrix base;                 // A^(0)
  std::vector<double> log_x;   // log x_i^(k); zero at k = 0
  std::vector<double> log_y;   // log y_i^(k); zero at k = 0
  std::vector<double> log_r0;  // log of the raw input's row sums (init pass)
};

struct ScalingResult {
  ScaleStatus status = ScaleStatus::Converged;
  long long iterations = 0;
  Matrix final;
  std::vector<double> log_x, log_y, log_r0;
  ScalingTrace trace;
};

struct RunOptions {
  double eps = 1e-6;
  Norm norm = Norm::L1;
  long long max_iters = 10000000;
  bool want_trace = false;
  long long trace_stride = 1;
  // Called on every iterate (k = 0 included), independent of trace_stride.
  std::function<void(const ScalingState&)> observer;
};

// Row-normalizes the input. Throws NotScalableError on a zero row or column.
ScalingState init_state(const Matrix& A);

// Advances to iterate k+1 (column pass into odd k, row pass into even k) and
// accumulates the scaling vectors. Returns false, leaving the state on the
// previous iterate, if a needed sum is zero.
bool sk_step(ScalingState& s);

// Deviations of the current iterate plus the free-side sum product.
TraceRow measure_state(const ScalingState& s);

double combined_error(const DeviationReport& d, Norm norm);

// Iterates until the combined error (the standardized side contributes 0)
// drops to eps, or max_iters is reached. Convergence is checked at every k
// including k = 0.
ScalingResult run_scaling(const Matrix& A, const RunOptions& opt);

// Largest relative mismatch of diag(exp log_x) * base * diag(exp log_y)
// against the current iterate, over entries > 1e-280.
double reconstruction_max_rel_error(const ScalingState& s);

// Extreme free-side sums move monotonically toward 1 in steps of two
// iterations: row extremes compared across odd k, column extremes across
// even k.
bool assert_monotone(const ScalingTrace& t, double tol = 1e-12);

struct PhaseOneReport {
  long long count = 0;   // iterations with l1 error above t*n
  double bound = 0;      // 8 t^-2 (ln n - ln rho)
  bool count_ok = false;
  bool product_ok = false;  // free-side product <= exp(-n t^2 / 8) at each such k
  bool ok = false;
};

PhaseOneReport assert_phase1(const ScalingTrace& t, double tthr, int n,
                             double rho);

void write_trace_csv(std::ostream& out, const ScalingTrace& t);

}  // namespace sklab
