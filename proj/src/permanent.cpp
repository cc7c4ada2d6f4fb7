#include "sklab/permanent.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace sklab {

double exact_permanent(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("permanent requires a square matrix");
  const int n = m.rows;
  if (n > 30) throw std::invalid_argument("exact permanent limited to n <= 30");

  // Ryser: per(A) = sum over nonempty S of (-1)^(n-|S|) prod_i sum_{j in S} A_ij.
  // Gray-code order changes one column per step, so the partial row sums are
  // updated in O(n).
  std::vector<double> part(n, 0.0);
  double total = 0.0, comp = 0.0;  // Kahan pair
  std::uint32_t gray = 0;
  int popcnt = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint32_t next_gray =
        static_cast<std::uint32_t>(k ^ (k >> 1));
    const std::uint32_t changed = gray ^ next_gray;
    const int j = std::countr_zero(changed);
    const bool added = (next_gray & changed) != 0;
    gray = next_gray;
    popcnt += added ? 1 : -1;
    if (added)
      for (int i = 0; i < n; ++i) part[i] += m.at(i, j);
    else
      for (int i = 0; i < n; ++i) part[i] -= m.at(i, j);

    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= part[i];
    const double term = ((n - popcnt) % 2 == 0) ? prod : -prod;

    const double y = term - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  return total;
}

namespace {

bool try_augment(const Matrix& m, int col, std::vector<int>& match_row,
                 std::vector<char>& visited) {
  const int n = m.rows;
  for (int i = 0; i < n; ++i) {
    if (m.at(i, col) <= 0.0 || visited[i]) continue;
    visited[i] = 1;
    if (match_row[i] < 0 || try_augment(m, match_row[i], match_row, visited)) {
      match_row[i] = col;
      return true;
    }
  }
  return false;
}

}  // namespace

bool permanent_is_zero(const Matrix& m) {
  if (!m.square())
    throw std::invalid_argument("permanent_is_zero requires a square matrix");
  const int n = m.rows;
  std::vector<int> match_row(n, -1);
  for (int col = 0; col < n; ++col) {
    std::vector<char> visited(n, 0);
    if (!try_augment(m, col, match_row, visited)) return true;
  }
  return false;
}

double hall_log_lower_bound(int n, double gamma, double rho) {
  const double floor_gn = std::floor(gamma * n);
  return n * std::log(rho) + std::lgamma(floor_gn + 1.0);
}

double vdw_log_lower_bound(int n) {
  return std::lgamma(n + 1.0) - n * std::log(static_cast<double>(n));
}

}  // namespace sklab
