// Density profiling of [0,1] matrices and the quantitative per-iterate
// bounds that go with it: the large-entry threshold theta (stated and
// derived exponent variants), the per-entry upper bound, the contraction
// factor tau, and the scaling condition number.
#pragma once

#include "sklab/matrix.hpp"
#include "sklab/scaling.hpp"

namespace sklab {

struct DensityProfile {
  double rho = 0;
  std::vector<int> row_counts, col_counts;  // entries >= rho per line
  int min_count = 0;
  double gamma_max = 0;  // min_count / n
};

// ceil(gamma*n) with a nudge so exact products like (29/48)*48 do not round
// up to 30.
int ceil_gamma_n(double gamma, int n);

// Divides by the largest entry. Rejects all-zero input.
Matrix normalize_by_max(const Matrix& m);

// Entries must lie in [0,1]; rho in (0,1]. Square matrices only.
DensityProfile density_profile(const Matrix& m, double rho);

// True iff every line has at least ceil(gamma*n) entries >= rho.
bool is_dense(const DensityProfile& p, double gamma);

// Scans rho over {2^-1, ..., 2^-20} and returns the profile with the largest
// gamma_max (ties keep the larger rho).
DensityProfile best_profile_over_grid(const Matrix& m);

// Threshold below which no line can have many entries, as a function of the
// standardized iterate's accuracy. Stated form uses rho^15 gamma^5; the
// derived form uses rho^18 gamma^8 and is the one predicates assert.
// Preconditions: gamma in (1/2,1], rho in (0,1], 0 <= alpha < 1 - 1/(2 gamma).
double theta_threshold_stated(double alpha, double gamma, double rho);
double theta_threshold_proof(double alpha, double gamma, double rho);

// 3 / (rho^3 gamma (2 gamma - 1 - alpha) n); requires 2 gamma - 1 - alpha > 0.
double entry_upper_bound(double alpha, double gamma, double rho, int n);

// 1 - theta (L - n/2)/n; requires L > n/2 and theta > 0.
double contraction_tau(double theta, long long L, int n);

// 1 - (8/135) rho^18 gamma^5 (gamma - 1/2)^5 (gamma - 9/20)^3; the uniform
// contraction constant implied by tau at the worst accepted accuracy.
double q_constant(double gamma, double rho);

// Minimum over all rows and columns of the number of entries strictly above
// the threshold.
int min_large_entry_count(const Matrix& m, double threshold);

// exp(spread of the combined log scaling vectors): ratio of largest to
// smallest diagonal scaling entry.
double condition_number(const ScalingResult& r);

}  // namespace sklab
