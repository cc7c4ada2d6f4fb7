#include "sklab/density.hpp"

#include <algorithm>
#include <cmath>

namespace sklab {

int ceil_gamma_n(double gamma, int n) {
  return static_cast<int>(std::ceil(gamma * n - 1e-9));
}

Matrix normalize_by_max(const Matrix& m) {
  validate_matrix(m);
  const double mx = *std::max_element(m.a.begin(), m.a.end());
  Matrix out = m;
  for (double& v : out.a) v /= mx;
  return out;
}

DensityProfile density_profile(const Matrix& m, double rho) {
  if (!m.square())
    throw std::invalid_argument("density_profile requires a square matrix");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("rho must lie in (0,1]");
  for (double v : m.a)
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("density_profile requires entries in [0,1]");
  const int n = m.rows;
  DensityProfile p;
  p.rho = rho;
  p.row_counts.assign(n, 0);
  p.col_counts.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.at(i, j) >= rho) {
        ++p.row_counts[i];
        ++p.col_counts[j];
      }
  p.min_count = n;
  for (int v : p.row_counts) p.min_count = std::min(p.min_count, v);
  for (int v : p.col_counts) p.min_count = std::min(p.min_count, v);
  p.gamma_max = static_cast<double>(p.min_count) / n;
  return p;
}

bool is_dense(const DensityProfile& p, double gamma) {
  const int n = static_cast<int>(p.row_counts.size());
  return ceil_gamma_n(gamma, n) <= p.min_count;
}

DensityProfile best_profile_over_grid(const Matrix& m) {
  DensityProfile best;
  bool have = false;
  for (int e = 1; e <= 20; ++e) {
    const DensityProfile p = density_profile(m, std::ldexp(1.0, -e));
    if (!have || p.gamma_max > best.gamma_max) {
      best = p;
      have = true;
    }
  }
  return best;
}

namespace {

void check_theta_domain(double alpha, double gamma, double rho) {
  if (!(gamma > 0.5 && gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in (1/2,1]");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("rho must lie in (0,1]");
  if (!(alpha >= 0.0 && alpha < 1.0 - 1.0 / (2.0 * gamma)))
    throw std::invalid_argument("alpha must lie in [0, 1 - 1/(2 gamma))");
}

}  // namespace

double theta_threshold_stated(double alpha, double gamma, double rho) {
  check_theta_domain(alpha, gamma, rho);
  return (1.0 / 27.0) * std::pow(rho, 15) * std::pow(gamma, 5) *
         (2.0 * gamma * (1.0 - alpha) - 1.0) *
         std::pow(2.0 * gamma - 1.0 - alpha, 3);
}

double theta_threshold_proof(double alpha, double gamma, double rho) {
  check_theta_domain(alpha, gamma, rho);
  return (1.0 / 27.0) * std::pow(rho, 18) * std::pow(gamma, 8) *
         (2.0 * gamma * (1.0 - alpha) - 1.0) *
         std::pow(2.0 * gamma - 1.0 - alpha, 3);
}

double entry_upper_bound(double alpha, double gamma, double rho, int n) {
  if (!(2.0 * gamma - 1.0 - alpha > 0.0))
    throw std::invalid_argument("entry_upper_bound requires 2 gamma - 1 - alpha > 0");
  return 3.0 / (std::pow(rho, 3) * gamma * (2.0 * gamma - 1.0 - alpha) * n);
}

double contraction_tau(double theta, long long L, int n) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(static_cast<double>(L) > n / 2.0))
    throw std::invalid_argument("contraction_tau requires L > n/2");
  return 1.0 - theta * (static_cast<double>(L) - n / 2.0) / n;
}

double q_constant(double gamma, double rho) {
  return 1.0 - (8.0 / 135.0) * std::pow(rho, 18) * std::pow(gamma, 5) *
                   std::pow(gamma - 0.5, 5) * std::pow(gamma - 0.45, 3);
}

int min_large_entry_count(const Matrix& m, double threshold) {
  const int n = m.rows;
  std::vector<int> rc(n, 0), cc(m.cols, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (m.at(i, j) > threshold) {
        ++rc[i];
        ++cc[j];
      }
  int mn = m.cols;
  for (int v : rc) mn = std::min(mn, v);
  for (int v : cc) mn = std::min(mn, v);
  return mn;
}

double condition_number(const ScalingResult& r) {
  double mx = r.log_x[0], mn = r.log_x[0];
  for (double v : r.log_x) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  for (double v : r.log_y) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  return std::exp(mx - mn);
}

}  // namespace sklab
