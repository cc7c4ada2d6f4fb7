// Builders for the slow-convergence matrices (the two-hub circulant family
// and its block-diagonal padding to lower densities), key-entry tracking,
// and the structural/recursion verifiers that go with the family.
#pragma once

#include "sklab/matrix.hpp"
#include "sklab/scaling.hpp"

#include <string>

namespace sklab {

struct SlowParams {
  int n = 0;         // even
  double gamma = 0;  // in (1/4, 1/2)
  double eps = 0;    // in (0, 1e-3]
  double delta = 0;  // in [eps/n, 1/(1000 n)]
  double rho = 0;    // delta^2 / (100 n^2)
  double beta = 0;   // eps^8 / (100 n^61), materialized via logs
  int band = 0;      // ceil(gamma * n)
};

// delta defaults to eps/n. Throws std::invalid_argument when the structural
// preconditions fail (n even, gamma in (1/4,1/2), n - 2*band >= 2,
// representable beta, delta range).
SlowParams make_slow_params(int n, double gamma, double eps);
SlowParams make_slow_params(int n, double gamma, double eps, double delta);

// Position classes of the family; every class is provably constant across
// iterates, which is what verify_equality_classes checks.
enum SlowClass : unsigned char {
  kTLOne = 0,       // top-left quadrant, circulant one
  kTLBeta,          // top-left quadrant, beta
  kBROne,           // bottom-right quadrant, circulant one
  kBRBeta,          // bottom-right quadrant, beta
  kAClass,          // rows above center x two center columns (2*band/n)
  kUClass,          // rows above center x columns right of center (beta)
  kXClass,          // center rows x columns left of center (beta)
  kBClass,          // center rows x columns right of center (one)
  kCenterDiag,      // the two diagonal center cells (one)
  kCenterAnti,      // the two off-diagonal center cells (beta)
  kVClass,          // rows below center x columns left of center (beta)
  kYClass,          // rows below center x two center columns (beta)
  kSlowClassCount
};

std::vector<unsigned char> slow_class_map(int n, int band);

Matrix build_slow_matrix(const SlowParams& p);

// Block-diagonal variant for densities gamma in [0, 1/4]: top-left block is
// the slow matrix at density 1/2 - 1/n with n = m - ceil(gamma*m) (gamma > 0,
// n must be even) or n = m - 1 (gamma = 0, m odd); bottom-right block is
// all-ones of size ceil(gamma*m), or the 1x1 block [1/m] when gamma = 0.
Matrix build_padded_slow_matrix(int m, double gamma, double eps);

struct KeyEntries {
  long long k = 0;
  double a = 0, b = 0, x = 0, y = 0, u = 0, v = 0;
};

// Reads the six tracked entries off an iterate (or the base matrix).
KeyEntries extract_key_entries(const Matrix& Ak, long long k);

// Every position class holds a single value, within relative tol.
bool verify_equality_classes(const Matrix& Ak, int band, double tol = 1e-12);

// The four row/column-sum relations tying sums to the key entries, within
// relative tol.
bool verify_sum_relations(const Matrix& Ak, double tol = 1e-12);

struct SlowRunOptions {
  long long max_k = 200000;
  double stop_l1 = 0.0;  // if > 0, stop once the combined l1 error <= this
};

struct SlowRun {
  std::vector<KeyEntries> keys;  // index k = 0..kmax
  std::vector<double> l1;        // combined l1 error per k
  std::vector<double> l2;        // combined l2 error per k
  long long kmax = 0;
};

SlowRun run_slow_instance(const Matrix& A, const SlowRunOptions& opt);

// Smallest k where the combined l1 error is <= eps, or -1 if never reached.
long long first_k_below(const std::vector<double>& err, double eps);

struct ItemCheck {
  std::string name;
  long long checked = 0;
  bool pass = true;
  long long first_violation_k = -1;
  std::string detail;
};

struct Condition45Report {
  long long T = 0;        // horizon actually checked
  long long K = 0;        // first k with min(a_k,b_k) < delta or k >= 1/delta
  bool clipped = false;   // requested horizon reached into k >= K
  std::vector<ItemCheck> items;
  bool all_pass() const;
};

// Verifies the recursion brackets (item1), the size bounds (item2), the
// refined a/b relations (item3), the two-step decay (item5), the cross-entry
// growth cap, the absolute caps on x,y,u,v, and the one-step decay
// b_k >= b_{k-1}(1 - 3 b_{k-1}), all with relative slack.
Condition45Report verify_condition45(const SlowRun& run, const SlowParams& p,
                                     long long horizon, double slack = 1e-10);

struct KeyRegimeReport {
  bool pass = true;
  long long horizon = 0;
  long long first_ab_violation = -1;    // first k with min(a,b) < delta
  long long first_xyuv_violation = -1;  // first k with max(x,y,u,v) >= rho/(4n)
  double worst_min_ab = 0;              // smallest min(a_k,b_k) over the horizon
  double worst_max_xyuv = 0;            // largest max(x,y,u,v) over the horizon
};

// min(a_k,b_k) >= delta and max(x_k,y_k,u_k,v_k) < rho/(4n) for all
// k <= horizon.
KeyRegimeReport check_key_entry_regime(const SlowRun& run, const SlowParams& p,
                                       long long horizon);

// Recovers the construction parameters from a built matrix (beta from the
// smallest entry, the band from row 0, eps back out of beta) and validates
// them by rebuilding and comparing entrywise. Throws std::invalid_argument
// if the matrix is not from this family.
SlowParams infer_slow_params(const Matrix& A);

}  // namespace sklab
