// Exact permanent oracle (Ryser, Gray-code order), structural zero test via
// bipartite matching on the support, and the combinatorial log lower bounds.
#pragma once

#include "sklab/matrix.hpp"

namespace sklab {

// Inclusion-exclusion over column subsets in Gray-code order with
// compensated accumulation. Square matrices with n <= 30 only (cost n*2^n).
double exact_permanent(const Matrix& m);

// True iff the support has no perfect matching, i.e. iff the matrix contains
// an s x t all-zero submatrix with s + t = n + 1. Equivalent to per(A) = 0
// for nonnegative A.
bool permanent_is_zero(const Matrix& m);

// log(rho^n * floor(gamma*n)!): lower bound on log per for a (gamma,rho)-dense
// matrix with gamma > 1/2. Log domain so n can be large.
double hall_log_lower_bound(int n, double gamma, double rho);

// log(n!/n^n): lower bound on log per for a doubly stochastic matrix.
double vdw_log_lower_bound(int n);

}  // namespace sklab
